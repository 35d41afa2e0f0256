#pragma once

// Lifting problems with a known surjective quasi-isomorphism, and bicomplexes
// with a planted staircase.
//
// Lifting: C = D (x) (Lambda[u_i] (x) F_p[w_i]) with du_i = w_i, which is
// acyclic over any F_p; p sends u_i to a random r_i with r_i^2 = 0 and w_i to
// dr_i. The substitution u_i -> u_i - r_i shows p is a quasi-iso.
//
// Staircase: a zig-zag a_1, ..., a_n on one antidiagonal with d'a_s = b_s =
// d''a_{s+1}, plus a tensor product of two random complexes, conjugated by a
// random invertible matrix in every bidegree.

#include <random>
#include <string>
#include <vector>

#include "obstrukt/dgalg.hpp"
#include "obstrukt/sullivan.hpp"
#include "support/random_algebra.hpp"

namespace obstrukt::testing {

struct LiftProblem {
  AlgebraPtr source;  // C
  AlgebraPtr target;  // D
  std::optional<Morphism> p;
};

inline Element random_element(std::mt19937& rng, const DgAlgebra& a, int n) {
  Element e = a.zero(n);
  for (std::size_t i = 0; i < e.coords.size(); ++i) e.coords[i] = rng() % a.prime().value();
  return e;
}

inline LiftProblem random_lift_problem(std::mt19937& rng, const Presentation& d_pres, int pairs) {
  LiftProblem lp;
  lp.target = DgAlgebra::compile(d_pres);
  const DgAlgebra& D = *lp.target;
  Presentation c = d_pres;
  std::vector<Element> images;
  for (std::size_t g = 0; g < D.generator_count(); ++g) images.push_back(D.generator(g));
  for (int k = 0; k < pairs; ++k) {
    int deg = 1 + static_cast<int>(rng() % 3);
    if (!D.prime().is_two() && deg % 2 == 0) ++deg;  // odd u keeps Lambda[u] automatic
    if (deg + 1 > c.degree_cap) deg = c.degree_cap - 1;
    const std::string u = "u" + std::to_string(k), w = "w" + std::to_string(k);
    c.generators.push_back({u, deg});
    c.generators.push_back({w, deg + 1});
    c.differential[u] = w;
    if (D.prime().is_two()) c.relations.push_back(u + "^2");
    Element r = D.zero(deg);
    for (int attempt = 0; attempt < 8; ++attempt) {
      Element cand = random_element(rng, D, deg);
      if (2 * deg > D.cap() || D.multiply(cand, cand).is_zero()) {
        r = cand;
        break;
      }
    }
    images.push_back(r);
    images.push_back(D.differential(r));
  }
  lp.source = DgAlgebra::compile(c);
  lp.p = Morphism(lp.source, lp.target, images);
  return lp;
}

// ---- bicomplexes ----

inline FpMatrix random_matrix(std::mt19937& rng, Prime p, std::size_t r, std::size_t c) {
  FpMatrix m(p, r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng() % p.value();
  return m;
}

inline std::pair<FpMatrix, FpMatrix> random_invertible(std::mt19937& rng, Prime p, std::size_t n) {
  while (true) {
    FpMatrix m = random_matrix(rng, p, n, n);
    if (rank(m) != n) continue;
    std::vector<FpVector> cols;
    for (std::size_t k = 0; k < n; ++k) cols.push_back(solve_affine(m, FpVector::unit(p, n, k)).point());
    return {m, FpMatrix::from_columns(p, n, cols)};
  }
}

/// Random cochain complex C_0 -> ... -> C_{len-1}: cycles plus pairs x -> dx,
/// in a random basis. Returns dims and the differentials d_k : C_k -> C_{k+1}.
struct RandomComplex {
  std::vector<std::size_t> dims;
  std::vector<FpMatrix> d;
};

inline RandomComplex random_complex(std::mt19937& rng, Prime p, int len) {
  RandomComplex c;
  std::vector<std::size_t> cyc(len), pairs(len, 0);
  for (int k = 0; k < len; ++k) cyc[k] = rng() % 2;
  for (int k = 0; k + 1 < len; ++k) pairs[k] = rng() % 2;
  for (int k = 0; k < len; ++k) c.dims.push_back(cyc[k] + pairs[k] + (k > 0 ? pairs[k - 1] : 0));
  // basis of C_k: [cycles][sources of pairs k][targets of pairs k-1], then a random change of basis
  std::vector<std::pair<FpMatrix, FpMatrix>> basis;
  for (int k = 0; k < len; ++k) basis.push_back(random_invertible(rng, p, c.dims[k]));
  for (int k = 0; k + 1 < len; ++k) {
    FpMatrix m(p, c.dims[k + 1], c.dims[k]);
    for (std::size_t t = 0; t < pairs[k]; ++t) m(cyc[k + 1] + pairs[k + 1] + t, cyc[k] + t) = 1;
    c.d.push_back(basis[k + 1].first * m * basis[k].second);
  }
  return c;
}

struct PlantedStaircase {
  Bicomplex b;
  int i = 0, j = 0;
  std::vector<FpVector> chain;
};

/// Zig-zag of length n starting at (0, n-1), summed with C (x) C' and
/// conjugated. The bicomplex has n+1 columns and n+1 rows.
inline PlantedStaircase planted_staircase(std::mt19937& rng, Prime p, int n, bool noise = true) {
  const int cols = n + 1, rows = n + 1;
  const RandomComplex ch = noise ? random_complex(rng, p, cols) : RandomComplex{std::vector<std::size_t>(cols, 0), {}};
  const RandomComplex cv = noise ? random_complex(rng, p, rows) : RandomComplex{std::vector<std::size_t>(rows, 0), {}};
  auto zig = [&](int i, int j) -> std::size_t {
    // a_s at (s-1, n-s), b_s at (s, n-s)
    if (i + j == n - 1 && i >= 0 && i < n) return 1;
    if (i + j == n && i >= 1 && i <= n) return 1;
    return 0;
  };
  Bicomplex raw(p, cols, rows);
  for (int i = 0; i < cols; ++i)
    for (int j = 0; j < rows; ++j) raw.set_dim(i, j, zig(i, j) + ch.dims[i] * cv.dims[j]);
  auto kron = [&](const FpMatrix& a, const FpMatrix& b) {
    FpMatrix out(p, a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t r1 = 0; r1 < a.rows(); ++r1)
      for (std::size_t c1 = 0; c1 < a.cols(); ++c1)
        for (std::size_t r2 = 0; r2 < b.rows(); ++r2)
          for (std::size_t c2 = 0; c2 < b.cols(); ++c2)
            out(r1 * b.rows() + r2, c1 * b.cols() + c2) = p.mul(a(r1, c1), b(r2, c2));
    return out;
  };
  for (int i = 0; i < cols; ++i)
    for (int j = 0; j < rows; ++j) {
      const std::size_t z = zig(i, j);
      if (i + 1 < cols) {
        FpMatrix h(p, raw.dim(i + 1, j), raw.dim(i, j));
        if (z && zig(i + 1, j) && i + j == n - 1) h(0, 0) = 1;  // d'a_s = b_s
        if (noise && i + 1 < cols) {
          const FpMatrix t = kron(ch.d[i], FpMatrix::identity(p, cv.dims[j]));
          for (std::size_t r = 0; r < t.rows(); ++r)
            for (std::size_t c = 0; c < t.cols(); ++c) h(zig(i + 1, j) + r, z + c) = t(r, c);
        }
        raw.set_horizontal(i, j, h);
      }
      if (j + 1 < rows) {
        FpMatrix v(p, raw.dim(i, j + 1), raw.dim(i, j));
        if (z && zig(i, j + 1) && i + j == n - 1 && i >= 1) v(0, 0) = 1;  // d''a_{s+1} = b_s
        if (noise) {
          FpMatrix t = kron(FpMatrix::identity(p, ch.dims[i]), cv.d[j]);
          if (i % 2 == 1)
            for (std::size_t r = 0; r < t.rows(); ++r)
              for (std::size_t c = 0; c < t.cols(); ++c) t(r, c) = p.neg(t(r, c));
          for (std::size_t r = 0; r < t.rows(); ++r)
            for (std::size_t c = 0; c < t.cols(); ++c) v(zig(i, j + 1) + r, z + c) = t(r, c);
        }
        raw.set_vertical(i, j, v);
      }
    }
  // conjugate by a random invertible matrix per bidegree
  std::vector<std::vector<FpMatrix>> P(cols), Pinv(cols);
  for (int i = 0; i < cols; ++i)
    for (int j = 0; j < rows; ++j) {
      auto [m, mi] = random_invertible(rng, p, raw.dim(i, j));
      P[i].push_back(m);
      Pinv[i].push_back(mi);
    }
  PlantedStaircase out{Bicomplex(p, cols, rows), 0, n - 1, {}};
  for (int i = 0; i < cols; ++i)
    for (int j = 0; j < rows; ++j) out.b.set_dim(i, j, raw.dim(i, j));
  for (int i = 0; i < cols; ++i)
    for (int j = 0; j < rows; ++j) {
      if (i + 1 < cols) out.b.set_horizontal(i, j, P[i + 1][j] * raw.horizontal(i, j) * Pinv[i][j]);
      if (j + 1 < rows) out.b.set_vertical(i, j, P[i][j + 1] * raw.vertical(i, j) * Pinv[i][j]);
    }
  for (int s = 1; s <= n; ++s) {
    const int i = s - 1, j = n - s;
    out.chain.push_back(P[i][j].column(0));  // a_s is the first basis vector of its block
  }
  return out;
}

}  // namespace obstrukt::testing
