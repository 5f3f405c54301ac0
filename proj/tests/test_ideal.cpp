#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <vector>

#include "acf/fp.hpp"
#include "acf/ideal.hpp"
#include "acf/rng.hpp"

using namespace acf;

namespace {

const long long kRingDs[] = {-1, -2, -3, -5, -6, -7};

QuadInt rand_qi(const Ring& ring, RngStream& rng, long long box) {
  return QuadInt{rng.uniform_int(2 * box + 1) - box,
                 rng.uniform_int(2 * box + 1) - box, ring.d};
}

}  // namespace

TEST_CASE("classification matches the discriminant's kronecker symbol") {
  for (long long d : kRingDs) {
    const Ring ring = make_ring(d);
    for (long long p = 3; p < 200; p += 2) {
      if (!is_prime(p)) continue;
      const long long k = kronecker(ring.discriminant, p);
      const PrimeKind kind = classify_prime(ring, p);
      if (k == 1) CHECK(kind == PrimeKind::split);
      if (k == 0) CHECK(kind == PrimeKind::ramified);
      if (k == -1) CHECK(kind == PrimeKind::inert);
    }
  }
}

TEST_CASE("worked split example: d = -5, p = 23") {
  const Ring ring = make_ring(-5);
  const PrimeIdeal ideal = prime_ideal_above(ring, 23);
  CHECK(ideal.kind == PrimeKind::split);
  CHECK(ideal.a0 == 8);
  CHECK(ideal.norm == 23);
  CHECK(ideal.f == 1);
  CHECK(ring.discriminant == -20);
  CHECK(generator_string(ideal) == "(23, 8+sqrt(-5))");
  // sigma(xi)^2 = d mod p since xi = sqrt(d) here
  CHECK(mul_mod(ideal.xi_residue, ideal.xi_residue, 23) == mod_norm(-5, 23));
}

TEST_CASE("prime_ideal_above rejects bad inputs") {
  const Ring ring = make_ring(-1);
  CHECK_THROWS_AS(prime_ideal_above(ring, 4), std::invalid_argument);
  CHECK_THROWS_AS(prime_ideal_above(ring, 2), std::invalid_argument);
  // 3 = 3 mod 4 is inert in Z[i]
  CHECK_THROWS_AS(prime_ideal_above(ring, 3), InertPrimeError);
}

TEST_CASE("sigma(xi) satisfies the minimal polynomial of xi mod p") {
  for (long long d : kRingDs) {
    const Ring ring = make_ring(d);
    for (long long p : usable_primes(ring, 200, true)) {
      const PrimeIdeal ideal = prime_ideal_above(ring, p);
      const long long s = ideal.xi_residue;
      if (ring.xi_case == XiCase::whole) {
        // s^2 = d
        CHECK(mul_mod(s, s, p) == mod_norm(d, p));
      } else {
        // s^2 - s - (d-1)/4 = 0
        const long long lhs =
            sub_mod(sub_mod(mul_mod(s, s, p), s, p), mod_norm((d - 1) / 4, p), p);
        CHECK(lhs == 0);
      }
    }
  }
}

TEST_CASE("split a0 is the smaller square root and divides correctly") {
  for (long long d : kRingDs) {
    const Ring ring = make_ring(d);
    for (long long p : usable_primes(ring, 200, false)) {
      const PrimeIdeal ideal = prime_ideal_above(ring, p);
      REQUIRE(ideal.kind == PrimeKind::split);
      CHECK(ideal.a0 >= 1);
      CHECK(ideal.a0 <= (p - 1) / 2);  // smaller of the two roots
      CHECK(mul_mod(ideal.a0, ideal.a0, p) == mod_norm(d, p));
    }
  }
}

TEST_CASE("sigma is a ring homomorphism with the ideal as kernel") {
  for (long long d : kRingDs) {
    const Ring ring = make_ring(d);
    for (long long p : usable_primes(ring, 60, true)) {
      const PrimeIdeal ideal = prime_ideal_above(ring, p);
      RngStream rng(21, static_cast<std::uint64_t>(-d), static_cast<std::uint64_t>(p));
      CHECK(sigma(make_qi(ring, 1, 0), ideal).value == 1);
      for (int t = 0; t < 200; ++t) {
        const QuadInt x = rand_qi(ring, rng, 50);
        const QuadInt y = rand_qi(ring, rng, 50);
        CHECK(sigma(add(ring, x, y), ideal).value ==
              add_mod(sigma(x, ideal).value, sigma(y, ideal).value, p));
        CHECK(sigma(mul(ring, x, y), ideal).value ==
              mul_mod(sigma(x, ideal).value, sigma(y, ideal).value, p));
      }
      // kernel contains both basis vectors and the stated generators
      CHECK(sigma(ideal.basis[0], ideal).value == 0);
      CHECK(sigma(ideal.basis[1], ideal).value == 0);
      CHECK(sigma(make_qi(ring, p, 0), ideal).value == 0);
      if (ideal.kind == PrimeKind::split) {
        // a0 + sqrt(d) in ring coordinates
        const QuadInt gen = ring.xi_case == XiCase::whole
                                ? make_qi(ring, ideal.a0, 1)
                                : make_qi(ring, ideal.a0 - 1, 2);
        CHECK(sigma(gen, ideal).value == 0);
      }
    }
  }
}

TEST_CASE("ideal basis spans index p and is Lagrange reduced") {
  for (long long d : kRingDs) {
    const Ring ring = make_ring(d);
    for (long long p : usable_primes(ring, 100, true)) {
      const PrimeIdeal ideal = prime_ideal_above(ring, p);
      const QuadInt b1 = ideal.basis[0];
      const QuadInt b2 = ideal.basis[1];
      // index = |det [[b1.a, b1.b], [b2.a, b2.b]]| = p
      const long long det = b1.a * b2.b - b1.b * b2.a;
      CHECK((det == p || det == -p));
      // reduced: |b1| <= |b2| and |2<b1,b2>| <= |b1|^2
      const long long n1 = norm(ring, b1);
      const long long n2 = norm(ring, b2);
      CHECK(n1 <= n2);
      const long long ip2 =
          norm(ring, add(ring, b1, b2)) - n1 - n2;  // 2<b1,b2>
      CHECK(std::abs(ip2) <= n1);
      // b1 is a shortest nonzero ideal element (brute box scan)
      long long min_norm = n1;
      for (long long u = -3; u <= 3; ++u)
        for (long long v = -3; v <= 3; ++v) {
          if (u == 0 && v == 0) continue;
          const QuadInt x = add(ring, QuadInt{u * b1.a, u * b1.b, d},
                                QuadInt{v * b2.a, v * b2.b, d});
          min_norm = std::min(min_norm, norm(ring, x));
        }
      CHECK(n1 == min_norm);
    }
  }
}

TEST_CASE("lift inverts sigma") {
  for (long long d : kRingDs) {
    const Ring ring = make_ring(d);
    for (long long p : usable_primes(ring, 60, true)) {
      const PrimeIdeal ideal = prime_ideal_above(ring, p);
      for (long long c = 0; c < p; ++c) {
        const QuadInt x = lift(c, ideal);
        CHECK(sigma(x, ideal).value == c);
      }
      // lift(sigma(x)) = x modulo the ideal
      RngStream rng(22, static_cast<std::uint64_t>(-d), static_cast<std::uint64_t>(p));
      for (int t = 0; t < 50; ++t) {
        const QuadInt x = rand_qi(ring, rng, 30);
        const QuadInt r = sub(ring, x, lift(sigma(x, ideal), ideal));
        CHECK(sigma(r, ideal).value == 0);
      }
    }
  }
}

TEST_CASE("sigma rejects mismatched rings and moduli") {
  const Ring r5 = make_ring(-5);
  const PrimeIdeal ideal = prime_ideal_above(r5, 23);
  CHECK_THROWS_AS(sigma(QuadInt{1, 1, -1}, ideal), std::invalid_argument);
  CHECK_THROWS_AS(lift(FpElem{1, 7}, ideal), std::invalid_argument);
}

TEST_CASE("usable_primes matches classification") {
  for (long long d : kRingDs) {
    const Ring ring = make_ring(d);
    const auto with_ram = usable_primes(ring, 100, true);
    const auto split_only = usable_primes(ring, 100, false);
    for (long long p = 3; p < 100; p += 2) {
      if (!is_prime(p)) continue;
      const PrimeKind k = classify_prime(ring, p);
      const bool in_all =
          std::find(with_ram.begin(), with_ram.end(), p) != with_ram.end();
      const bool in_split =
          std::find(split_only.begin(), split_only.end(), p) != split_only.end();
      CHECK(in_all == (k != PrimeKind::inert));
      CHECK(in_split == (k == PrimeKind::split));
    }
  }
}

TEST_CASE("ramified generator string uses sqrt(d) alone") {
  const Ring ring = make_ring(-5);
  const PrimeIdeal ideal = prime_ideal_above(ring, 5);
  CHECK(ideal.kind == PrimeKind::ramified);
  CHECK(generator_string(ideal) == "(5, sqrt(-5))");
}
