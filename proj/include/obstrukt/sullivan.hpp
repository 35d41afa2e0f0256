#pragma once

// Staged Sullivan resolutions of commutative dg-algebras, lifting against
// surjective quasi-isomorphisms, surjectivization of quasi-isomorphisms,
// cotriple product sets over defining systems, and the staircase checker for
// bicomplexes.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "obstrukt/dgalg.hpp"
#include "obstrukt/fp.hpp"
#include "obstrukt/products.hpp"

namespace obstrukt {

struct SullivanGenerator {
  std::string name;
  int degree = 0;
  int stage = 0;
  std::string d;  // polystring over earlier generators, "0" on stage 0
  Element image;  // in the base algebra
};

struct SullivanStage {
  std::vector<std::size_t> generators;  // indices into SullivanModel::generators
  /// dim ker H^n(m_j) for n = 0..cap-1, after this stage was adjoined.
  std::vector<std::size_t> kernel_dims;
  bool surjective = false;
};

struct SullivanModel {
  AlgebraPtr base;
  int cap = 0;
  std::vector<SullivanGenerator> generators;
  std::vector<SullivanStage> stages;
  AlgebraPtr algebra;  // (Sym(V_0 + ... + V_k), d) compiled to cap
  std::optional<Morphism> structure_map;

  const Morphism& map() const { return *structure_map; }
  bool quasi_iso() const;
  /// Generators of stage >= 1; their span generates the ideal that product patterns live in.
  bool in_higher_ideal(const Element& u) const;
};

/// V_0 is a basis of H^1..H^{cap-1}(A); each further stage kills an RREF basis
/// of ker H(m). The base must be connected (H^0 = F_p). `cap` defaults to the
/// base cap and may not exceed it (CapExceeded).
SullivanModel sullivan_step(const AlgebraPtr& base, int steps, std::optional<int> cap = std::nullopt);

/// h: model -> C with p o h = g, by the correction procedure: take a primitive
/// of h(dv), measure the defect in the target and absorb it through a cocycle
/// and the preimage of a primitive. p must be surjective and a quasi-iso in
/// degrees below the model cap; g must have the model as source and p's
/// target as target.
Morphism lift(const SullivanModel& model, const Morphism& p, const Morphism& g);

struct Surjectivization {
  AlgebraPtr algebra;               // C = B (x) Sym(W + dW)
  std::optional<Morphism> to_target;  // C -> A, surjective below the cap
  std::optional<Morphism> projection; // C -> B
  std::vector<std::size_t> complement_dims;  // dim W^n for n = 0..cap-1
  int cap = 0;
};

/// Throws NotQuasiIso when f is not a quasi-iso below the cap, or when the
/// adjoined free algebra on the complement fails to be acyclic in the
/// certified range (Sym of an acyclic complex can carry p-th power classes).
Surjectivization surjectivize(const Morphism& f, std::optional<int> cap = std::nullopt);

/// H(g)(sigma) over every defining system g on the sub-Sullivan algebra
/// generated by the generators occurring in sigma: stage 0 generators range
/// over the cocycles representing m's class, later generators over the
/// primitives of g(dv).
ProductSet cotriple_product_set(const SullivanModel& model, const CohomologyRing& h_base, const Element& sigma,
                                const ProductOptions& opts = {});

/// sigma = V^p where dV = u_x u_y, u_x and u_y the stage 0 combinations for
/// the classes x and y, and V a combination of stage 1 generators. Needs a
/// model with at least one stage; throws NotInIdeal if xy does not vanish.
Element type1_pattern(const SullivanModel& model, const CohomologyRing& h_base, const HClass& x, const HClass& y);

nlohmann::ordered_json sullivan_report(const SullivanModel& model);
nlohmann::ordered_json sullivan_report(const AlgebraPtr& base, int steps, std::optional<int> cap = std::nullopt);

// ---- bicomplexes ----

/// A_{i,j} for 0 <= i < columns, 0 <= j < rows, with d' : (i,j) -> (i+1,j)
/// and d'' : (i,j) -> (i,j+1). Total degree i + j, total differential
/// d' + d''; the column filtration is by i.
class Bicomplex {
 public:
  Bicomplex(Prime p, int columns, int rows);

  Prime prime() const noexcept { return p_; }
  int columns() const noexcept { return cols_; }
  int rows() const noexcept { return rows_; }
  std::size_t dim(int i, int j) const;
  void set_dim(int i, int j, std::size_t n);
  /// Matrices are (target dim) x (source dim); unset maps are zero.
  void set_horizontal(int i, int j, FpMatrix m);
  void set_vertical(int i, int j, FpMatrix m);
  FpMatrix horizontal(int i, int j) const;
  FpMatrix vertical(int i, int j) const;

  FpVector apply_horizontal(int i, int j, const FpVector& v) const;
  FpVector apply_vertical(int i, int j, const FpVector& v) const;

  /// d'^2 = 0, d''^2 = 0 and d'd'' + d''d' = 0; the witness names the first failure.
  MorphismReport check() const;

  /// Total complex in degree n: blocks (i, n-i) in increasing i.
  std::size_t total_dim(int n) const;
  std::size_t block_offset(int n, int i) const;
  FpMatrix total_differential(int n) const;  // n -> n+1

 private:
  bool valid(int i, int j) const { return i >= 0 && j >= 0 && i < cols_ && j < rows_; }
  Prime p_;
  int cols_, rows_;
  std::vector<std::size_t> dims_;
  std::map<std::pair<int, int>, FpMatrix> h_, v_;
};

struct StaircaseReport {
  int length = 0;
  bool total_identity = false;   // dc = d''c_1 + (-1)^{n-1} d'c_n
  bool applicable = false;       // d''c_1 = 0
  bool survives = false;         // c_1 extends to an element of Z_n (found by solving, not from the chain)
  bool differential_matches = false;  // d_n[c_1] = (-1)^{n-1}[d'c_n] in E_n
  bool differential_nonzero = false;
  std::vector<std::size_t> page_dims;  // dim E_r at c_1's position, r = 1..n
  std::string detail;
  bool ok() const { return total_identity && (!applicable || (survives && differential_matches)); }
};

/// c_s sits in A_{i+s-1, j-s+1}. Throws NotAStaircase when d'c_s != d''c_{s+1},
/// naming the first failing s.
StaircaseReport staircase_check(const Bicomplex& b, int i, int j, const std::vector<FpVector>& chain);

/// dim E_r^{i, n-i} of the column filtration, by subquotients of the total complex.
std::size_t spectral_page_dim(const Bicomplex& b, int r, int i, int n);

}  // namespace obstrukt
