#pragma once

// Finitely presented graded-commutative dg-algebras over F_p, compiled to
// exact per-degree linear algebra below a degree cap.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "obstrukt/fp.hpp"

namespace obstrukt {

struct Generator {
  std::string name;
  int degree = 1;
};

struct Presentation {
  std::uint32_t prime = 2;
  std::vector<Generator> generators;
  std::vector<std::string> relations;
  std::map<std::string, std::string> differential;  // absent => d = 0
  int degree_cap = 0;
};

/// Exponent vector over the declared generators.
using Exponents = std::vector<std::uint16_t>;

/// Sparse polynomial in the free graded-commutative algebra on the generators.
using SparsePoly = std::map<Exponents, Scalar>;

/// Homogeneous element: coordinates over the basis of one degree.
struct Element {
  int degree = 0;
  FpVector coords;

  bool is_zero() const { return coords.is_zero(); }
  friend bool operator==(const Element&, const Element&) = default;
};

/// Free graded-commutative algebra arithmetic on exponent vectors. For odd p
/// the square of an odd-degree generator is zero; for p = 2 there is no such
/// rule and all signs collapse.
class FreeMonoid {
 public:
  FreeMonoid(Prime p, std::vector<int> degrees);

  Prime prime() const noexcept { return p_; }
  std::size_t size() const noexcept { return degrees_.size(); }
  int degree(std::size_t gen) const { return degrees_[gen]; }
  int degree(const Exponents& e) const;
  bool admissible(const Exponents& e) const;

  /// Product a*b as (coefficient, monomial); coefficient 0 means the product vanishes.
  std::pair<Scalar, Exponents> multiply(const Exponents& a, const Exponents& b) const;
  SparsePoly multiply(const SparsePoly& a, const SparsePoly& b) const;
  /// All admissible monomials of exactly degree n, in descending lex order.
  std::vector<Exponents> monomials_of_degree(int n) const;
  Exponents generator(std::size_t gen) const;

 private:
  Prime p_;
  std::vector<int> degrees_;
};

void add_to(SparsePoly& acc, const SparsePoly& other, Scalar coeff, Prime p);

class DgAlgebra;
using AlgebraPtr = std::shared_ptr<const DgAlgebra>;

struct CompileOptions {
  /// Exhaustively check graded commutativity, associativity and Leibniz on basis tuples.
  bool exhaustive_checks = false;
};

/// Structural self-check results; each flag is the outcome of an exhaustive
/// sweep over basis tuples within the cap.
struct StructureReport {
  bool d_squared_zero = true;
  bool leibniz = true;
  bool graded_commutative = true;
  bool associative = true;
  std::string witness;
  bool ok() const { return d_squared_zero && leibniz && graded_commutative && associative; }
};

class DgAlgebra {
 public:
  static AlgebraPtr compile(const Presentation& pres, const CompileOptions& opts = {});

  const Presentation& presentation() const noexcept { return pres_; }
  Prime prime() const noexcept { return monoid_.prime(); }
  int cap() const noexcept { return pres_.degree_cap; }
  const FreeMonoid& monoid() const noexcept { return monoid_; }
  std::size_t generator_count() const noexcept { return monoid_.size(); }
  std::optional<std::size_t> generator_index(const std::string& name) const;

  std::size_t dim(int n) const;
  const Exponents& basis_monomial(int n, std::size_t i) const;
  std::vector<Exponents> basis(int n) const;

  Element zero(int n) const;
  Element one() const;
  Element basis_element(int n, std::size_t i) const;
  /// Class of a free monomial in the quotient; zero if the monomial is not admissible.
  Element monomial(const Exponents& e) const;
  Element from_sparse(const SparsePoly& poly, int degree) const;
  SparsePoly to_sparse(const Element& u) const;
  Element generator(std::size_t gen) const;
  /// Parses a homogeneous polynomial in the generator names.
  Element parse(const std::string& text) const;
  /// Parses without a degree hint; an empty/zero polynomial needs `fallback_degree`.
  Element parse(const std::string& text, int fallback_degree) const;
  SparsePoly parse_sparse(const std::string& text) const;

  Element multiply(const Element& u, const Element& v) const;
  Element power(const Element& u, unsigned k) const;
  Element power_p(const Element& u) const { return power(u, prime().value()); }
  Element differential(const Element& u) const;
  Element add(const Element& u, const Element& v) const;
  Element scale(const Element& u, Scalar c) const;

  /// Matrix of d: degree n -> n+1, defined for 0 <= n < cap.
  const FpMatrix& d_matrix(int n) const;
  /// Solutions c of dc = v, in coordinates of degree |v|-1.
  AffineSet find_primitive(const Element& v) const;

  std::string to_string(const Element& u) const;
  std::string monomial_string(const Exponents& e) const;

  StructureReport verify_structure() const;

 private:
  DgAlgebra(Presentation pres, FreeMonoid monoid) : pres_(std::move(pres)), monoid_(std::move(monoid)) {}

  struct Degree {
    std::vector<Exponents> monomials;
    std::map<Exponents, std::size_t> index;
    Subspace ideal;
    std::vector<std::size_t> basis;     // indices of standard monomials
    std::vector<FpVector> normal_form;  // per monomial, coordinates over basis
  };

  void check_degree(int n) const;
  FpVector sparse_to_monomial_coords(const SparsePoly& poly, int n) const;
  SparsePoly free_differential(const Exponents& e) const;

  Presentation pres_;
  FreeMonoid monoid_;
  std::vector<std::optional<SparsePoly>> gen_differential_;
  std::vector<SparsePoly> relations_;
  std::vector<Degree> degrees_;
  std::vector<FpMatrix> d_;
  mutable std::map<Exponents, SparsePoly> d_cache_;

  friend class CohomologyRing;
  friend class Morphism;
};

/// H^n = ker d_n / im d_{n-1} for 0 <= n < cap, with canonical representatives.
class CohomologyRing {
 public:
  explicit CohomologyRing(AlgebraPtr alg);

  const DgAlgebra& algebra() const noexcept { return *alg_; }
  const AlgebraPtr& algebra_ptr() const noexcept { return alg_; }
  Prime prime() const noexcept { return alg_->prime(); }
  /// Highest certified degree (cap - 1).
  int top() const noexcept { return alg_->cap() - 1; }
  bool in_range(int n) const noexcept { return n >= 0 && n <= top(); }

  std::size_t dim(int n) const;
  const Subspace& cocycles(int n) const;
  const Subspace& coboundaries(int n) const;
  Element representative(int n, std::size_t i) const;
  std::vector<Element> representatives(int n) const;

  bool is_cocycle(const Element& u) const;
  bool is_coboundary(const Element& u) const;
  /// Class coordinates of a cocycle; throws NotACocycle otherwise.
  FpVector project(const Element& cocycle) const;
  /// The canonical representative of a class.
  Element lift(int n, const FpVector& coords) const;

  FpVector multiply(int n, const FpVector& x, int m, const FpVector& y) const;
  /// Matrix of u -> u^p from H^n to H^{pn}; requires pn <= top().
  FpMatrix frobenius(int n) const;
  /// Span of {[L^p] : L any cochain of degree n} inside H^{pn}.
  Subspace cochain_power_image(int n) const;

  std::string class_string(int n, const FpVector& coords) const;
  std::vector<int> dimensions() const;

 private:
  AlgebraPtr alg_;
  std::vector<Subspace> z_;
  std::vector<Subspace> b_;
  std::vector<RelativeQuotient> h_;
};

struct MorphismReport {
  bool ok = true;
  std::string witness;
};

/// Algebra map given by images of the source generators.
class Morphism {
 public:
  /// Throws NotAMorphism with the first violated relation or chain condition.
  Morphism(AlgebraPtr source, AlgebraPtr target, std::vector<Element> images);
  static Morphism from_strings(AlgebraPtr source, AlgebraPtr target,
                               const std::map<std::string, std::string>& images);
  static Morphism identity(AlgebraPtr alg);
  /// Builds without checking; use check() to obtain the report.
  static Morphism unchecked(AlgebraPtr source, AlgebraPtr target, std::vector<Element> images);

  const DgAlgebra& source() const noexcept { return *src_; }
  const DgAlgebra& target() const noexcept { return *tgt_; }
  const AlgebraPtr& source_ptr() const noexcept { return src_; }
  const AlgebraPtr& target_ptr() const noexcept { return tgt_; }
  const std::vector<Element>& images() const noexcept { return images_; }

  MorphismReport check() const;
  Element apply(const Element& u) const;
  Element apply_monomial(const Exponents& e) const;
  /// Chain-level matrix in degree n (source basis -> target basis).
  FpMatrix matrix(int n) const;
  bool surjective(int n) const;

 private:
  Morphism(AlgebraPtr source, AlgebraPtr target, std::vector<Element> images, bool);
  AlgebraPtr src_;
  AlgebraPtr tgt_;
  std::vector<Element> images_;
};

MorphismReport check_morphism(const Morphism& f);
/// Per-degree matrices of H(f) for degrees 0..min(top) of the two rings.
std::vector<FpMatrix> induced_map(const Morphism& f, const CohomologyRing& hs, const CohomologyRing& ht);
bool is_quasi_iso(const Morphism& f, const CohomologyRing& hs, const CohomologyRing& ht);
bool is_quasi_iso(const Morphism& f);
bool is_iso(const FpMatrix& m);

/// Basis of the free divided-power algebra on one generator of the given
/// degree, per degree 0..cap. Even case: exponent vectors over x_1, x_2, ...
/// with |x_k| = k * gen_degree and exponents below p. Odd case: {1, x}.
std::vector<std::vector<Exponents>> divided_power_basis(Prime p, int gen_degree, int cap);

}  // namespace obstrukt
