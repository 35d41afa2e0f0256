#include <doctest.h>

#include <random>

#include "obstrukt/fp.hpp"

using namespace obstrukt;

namespace {

FpMatrix random_matrix(Prime p, std::size_t r, std::size_t c, std::mt19937& rng, int zero_bias = 1) {
  FpMatrix m(p, r, c);
  std::uniform_int_distribution<Scalar> dist(0, p.value() - 1);
  std::uniform_int_distribution<int> coin(0, zero_bias);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = coin(rng) ? 0 : dist(rng);
  return m;
}

// Enumerates all vectors of F_p^n.
template <class F>
void for_all_vectors(Prime p, std::size_t n, F&& f) {
  FpVector v(p, n);
  while (true) {
    f(v);
    std::size_t i = 0;
    while (i < n && ++v[i] == p.value()) v[i++] = 0;
    if (i == n) return;
  }
}

}  // namespace

TEST_CASE("prime arithmetic") {
  CHECK_THROWS_AS(Prime(4), Error);
  CHECK_THROWS_AS(Prime(1), Error);
  const Prime p(7);
  CHECK(p.mul(3, 5) == 1);
  CHECK(p.inv(3) == 5);
  CHECK(p.reduce(-1) == 6);
  CHECK(p.pow(3, 6) == 1);
  try {
    Prime q(9);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPrime);
  }
}

TEST_CASE("mixed moduli are rejected") {
  FpVector a(Prime(2), 3), b(Prime(3), 3);
  try {
    a.axpy(1, b);
    FAIL("expected ModulusMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ModulusMismatch);
  }
}

TEST_CASE("kernel and image agree with enumeration") {
  std::mt19937 rng(11);
  for (Scalar pv : {2u, 3u, 5u}) {
    const Prime p(pv);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
      FpMatrix m = random_matrix(p, r, c, rng);
      std::size_t ker_count = 0;
      for_all_vectors(p, c, [&](const FpVector& v) {
        if (m.apply(v).is_zero()) ++ker_count;
      });
      Subspace k = kernel(m);
      std::size_t expect = 1;
      for (std::size_t i = 0; i < k.dim(); ++i) expect *= pv;
      CHECK(ker_count == expect);
      CHECK(k.dim() + rank(m) == c);
      for (const auto& v : k.basis()) CHECK(m.apply(v).is_zero());
      Subspace im = image(m);
      for_all_vectors(p, c, [&](const FpVector& v) { CHECK(im.contains(m.apply(v))); });
    }
  }
}

TEST_CASE("solve_affine matches enumeration") {
  std::mt19937 rng(5);
  for (Scalar pv : {2u, 3u}) {
    const Prime p(pv);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
      FpMatrix m = random_matrix(p, r, c, rng);
      FpVector b = random_matrix(p, r, 1, rng).column(0);
      AffineSet s = solve_affine(m, b);
      std::size_t count = 0;
      for_all_vectors(p, c, [&](const FpVector& v) {
        const bool sol = m.apply(v) == b;
        count += sol;
        CHECK(s.contains(v) == sol);
      });
      CHECK(s.cardinality().value() == count);
      std::size_t visited = 0;
      s.for_each([&](const FpVector& v) {
        CHECK(m.apply(v) == b);
        ++visited;
        return true;
      });
      CHECK(visited == count);
    }
  }
}

TEST_CASE("relative quotient projection and lift are inverse") {
  std::mt19937 rng(3);
  for (Scalar pv : {2u, 3u, 5u}) {
    const Prime p(pv);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = 2 + rng() % 5;
      FpMatrix gens = random_matrix(p, 1 + rng() % 4, n, rng, 2);
      std::vector<FpVector> sup_rows, sub_rows;
      for (std::size_t i = 0; i < gens.rows(); ++i) sup_rows.push_back(gens.row(i));
      // sub = span of random combinations of super generators
      for (int k = 0; k < 2; ++k) {
        FpVector v(p, n);
        for (const auto& g : sup_rows) v.axpy(rng() % pv, g);
        sub_rows.push_back(v);
      }
      Subspace sup = Subspace::span(p, n, sup_rows), sub = Subspace::span(p, n, sub_rows);
      RelativeQuotient q(sub, sup);
      CHECK(q.dim() + sub.dim() == sup.dim());
      for (std::size_t i = 0; i < q.dim(); ++i) CHECK(q.project(q.representatives()[i]) == FpVector::unit(p, q.dim(), i));
      for_all_vectors(p, n, [&](const FpVector& v) {
        if (!sup.contains(v)) return;
        const FpVector back = q.lift(q.project(v));
        CHECK(sub.contains(back - v));
      });
    }
  }
}

TEST_CASE("intersection") {
  const Prime p(3);
  std::vector<FpVector> a{FpVector(p, {1, 0, 0}), FpVector(p, {0, 1, 0})};
  std::vector<FpVector> b{FpVector(p, {0, 1, 1}), FpVector(p, {1, 1, 0})};
  Subspace i = intersection(Subspace::span(p, 3, a), Subspace::span(p, 3, b));
  CHECK(i.dim() == 1);
  CHECK(i.contains(FpVector(p, {1, 1, 0})));
}
