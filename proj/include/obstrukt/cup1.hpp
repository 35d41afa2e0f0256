#pragma once

// Lax and strict cup-1-algebras over F_2: normal forms under the Hirsch
// identity, the Steenrod differential, finite presentations compiled to
// complexes, and associative comparison maps to commutative algebras.
//
// Normal form. A monomial is a cup product W1 * ... * Wn of words; a word is
// a cup-1 chain g1 cup1 g2 cup1 ... cup1 gk, optionally ending in a cup1 with
// a product of two or more words (u cup1 (v * w) has no rewrite in the lax
// setting and is kept as its own basis symbol). In strict mode cup-1 is
// commutative, words are sorted, and u cup1 (v * w) is rewritten through
// commutativity and the Hirsch identity.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "obstrukt/dgalg.hpp"
#include "obstrukt/fp.hpp"

namespace obstrukt::cup1 {

enum class Mode { Lax, Strict };

struct Mono;

struct Word {
  std::vector<int> gens;
  std::vector<Mono> tail;  // empty, or one product of >= 2 words (lax only)
};

struct Mono {
  std::vector<Word> words;  // empty = unit
};

int compare(const Word& a, const Word& b);
int compare(const Mono& a, const Mono& b);
struct MonoLess {
  bool operator()(const Mono& a, const Mono& b) const { return compare(a, b) < 0; }
};
inline bool operator==(const Mono& a, const Mono& b) { return compare(a, b) == 0; }

/// F_2 linear combination of normal monomials.
using Poly = std::set<Mono, MonoLess>;
void toggle(Poly& p, const Mono& m);
void add_to(Poly& acc, const Poly& other);

/// Word-length multigrading; additive under both products. Missing
/// components count as zero.
using Weight = std::vector<int>;

struct Cup1Generator {
  std::string name;
  int degree = 0;
  Weight weight;
};

/// Unnormalized expression tree.
struct Term {
  enum class Op { Gen, Cup, Cup1 };
  Op op = Op::Gen;
  int gen = 0;
  std::shared_ptr<const Term> left, right;

  static std::shared_ptr<const Term> generator(int g);
  static std::shared_ptr<const Term> node(Op op, std::shared_ptr<const Term> l, std::shared_ptr<const Term> r);
};
using TermPtr = std::shared_ptr<const Term>;

class Calculus {
 public:
  Calculus(std::vector<Cup1Generator> gens, Mode mode);

  Mode mode() const noexcept { return mode_; }
  const std::vector<Cup1Generator>& generators() const noexcept { return gens_; }
  std::optional<int> index(const std::string& name) const;

  /// Monomials with a weight component above the cap are dropped (they span
  /// an ideal). Degrees above max_degree raise CapExceeded.
  void set_caps(std::optional<Weight> max_weight, std::optional<int> max_degree);
  void set_differential(const std::string& gen, const std::string& text);
  void set_alias(const std::string& name, const std::string& text);

  Poly generator(int i) const;
  Poly cup(const Poly& a, const Poly& b) const;
  Poly cup1(const Poly& a, const Poly& b) const;
  Poly d(const Poly& a) const;
  Poly d(const Mono& m) const;

  /// Innermost-first normalization (the calculus itself).
  Poly normalize(const Term& t) const;
  /// Outermost-first: Hirsch and cup-1 reassociation applied at the root
  /// before the subterms are normalized.
  Poly normalize_outermost(const Term& t) const;
  int degree(const Term& t) const;
  std::string to_string(const Term& t) const;

  /// Polystring with `*` for cup and `cup1(u, v)` for cup-1; aliases expand.
  Poly parse(const std::string& text) const;

  int degree(const Mono& m) const;
  Weight weight(const Mono& m) const;
  bool contains_generator(const Mono& m, int gen) const;
  bool has_cup1(const Mono& m) const;
  /// Largest number of cup-1 factors in any (nested) word of m.
  int cup1_length(const Mono& m) const;
  std::string to_string(const Mono& m) const;
  std::string to_string(const Poly& p) const;

 private:
  Poly cup1_mono(const Mono& a, const Mono& b) const;
  Poly cup1_word(const Word& w, const Mono& b) const;
  Poly d_word(const Word& w) const;
  Poly keep(Mono m) const;
  Poly from_parsed(const void* poly) const;
  std::string word_string(const Word& w) const;

  std::vector<Cup1Generator> gens_;
  Mode mode_;
  std::optional<Weight> max_weight_;
  std::optional<int> max_degree_;
  std::map<int, Poly> differential_;
  std::map<std::string, Poly> aliases_;
};

// ---- symbolic verification of the Frobenius cocycle ----

struct CocycleReport {
  bool zero = false;       // d(expression) normalizes to 0
  Poly remainder;
  std::string remainder_text;
  std::vector<std::string> log;
};

/// Lax: c*c + cup1(c, a*b) + K with dK = cup1(a*b, a*b).
/// Strict: c*c + cup1(c, a*b) + a*a*K' + L'*b*b with dK' = cup1(b, b), dL' = cup1(a, a).
/// `perturbed` drops the K (resp. K', L') terms.
CocycleReport verify_frobenius_cocycle(Mode mode, bool perturbed = false);
nlohmann::ordered_json verify_frobenius_cocycle_json(Mode mode, bool perturbed);

// ---- finitely presented cup-1-algebras ----

struct Cup1Presentation {
  std::vector<Cup1Generator> generators;
  std::map<std::string, std::string> differential;
  std::map<std::string, std::string> aliases;
  std::vector<std::string> relations;
  /// Monomials containing `generator` are killed unless listed in `allowed`.
  struct Restriction {
    std::string generator;
    std::vector<std::string> allowed;
  };
  std::vector<Restriction> restrictions;
  std::optional<Weight> max_weight;
  /// Monomials containing a cup-1 word with more factors are killed.
  std::optional<int> max_cup1_length;
  Mode mode = Mode::Lax;
  int degree_cap = 0;
};

/// A presentation file whose "cup1" object carries mode, aliases, weights,
/// max_weight, max_cup1_length, restrictions and (optionally) maps.
Cup1Presentation cup1_presentation_from_json(const nlohmann::ordered_json& doc);

/// Row echelon form over F_2 on packed bit rows, grown one vector at a time.
class F2Echelon {
 public:
  using Bits = std::vector<std::uint64_t>;
  explicit F2Echelon(std::size_t n = 0) : n_(n), pivot_row_(n, -1) {}

  std::size_t ambient() const noexcept { return n_; }
  std::size_t dim() const noexcept { return rows_.size(); }
  Bits zero() const { return Bits((n_ + 63) / 64, 0); }
  /// Clears every pivot column of v.
  void reduce(Bits& v) const;
  /// Returns false when v already lies in the span.
  bool insert(Bits v);
  bool is_pivot(std::size_t col) const { return pivot_row_[col] >= 0; }
  const std::vector<Bits>& rows() const noexcept { return rows_; }

 private:
  std::size_t n_;
  std::vector<Bits> rows_;
  std::vector<std::ptrdiff_t> pivot_row_;
};

struct IdentityReport {
  bool d_squared_zero = true;
  bool hirsch = true;
  bool steenrod = true;
  bool cup_associative = true;
  bool cup1_associative = true;
  std::string witness;
  bool ok() const { return d_squared_zero && hirsch && steenrod && cup_associative && cup1_associative; }
};

class Cup1Algebra {
 public:
  /// Throws IllFormedDifferential when d does not preserve the ideal, with
  /// the offending element as witness.
  static Cup1Algebra compile(const Cup1Presentation& pres);

  const Calculus& calculus() const noexcept { return calc_; }
  int cap() const noexcept { return cap_; }
  std::size_t dim(int n) const;
  std::size_t total_dim() const;
  const std::vector<Mono>& basis(int n) const;
  /// Coordinates of a polynomial over basis(n) after reduction by the ideal.
  FpVector reduce(const Poly& p, int n) const;
  Poly lift(const FpVector& v, int n) const;
  const FpMatrix& d_matrix(int n) const;  // n -> n+1

  std::size_t h_dim(int n) const;
  std::vector<Poly> h_representatives(int n) const;
  FpVector h_project(const FpVector& cocycle, int n) const;

  /// Spanning set of the ideal in degree n, as polynomials in normal monomials.
  std::vector<Poly> ideal_basis(int n) const;

  /// Exhaustive table checks on basis tuples.
  IdentityReport verify_identities() const;

 private:
  explicit Cup1Algebra(Calculus c) : calc_(std::move(c)) {}
  struct Piece {
    std::vector<Mono> universe;           // all normal monomials of this degree
    std::map<Mono, std::size_t, MonoLess> index;
    F2Echelon ideal;
    std::vector<std::size_t> basis_cols;  // universe columns forming the quotient basis
    std::vector<Mono> basis;
    FpMatrix d{Prime(2), 0, 0};
    std::optional<RelativeQuotient> h;
  };
  F2Echelon::Bits universe_bits(const Poly& p, int n) const;
  Calculus calc_;
  int cap_ = 0;
  std::vector<Piece> pieces_;
};

/// An associative comparison map from a compiled cup-1-algebra to a
/// commutative dg-algebra, fixed by the images of words (cup-1 chains,
/// including single generators) and extended multiplicatively over cup.
/// Words without an image go to 0.
struct AssocMap {
  std::map<std::string, std::string> images;  // word text -> target polystring
};

struct AssocReport {
  bool chain_map = false;
  bool multiplicative = false;
  bool kills_ideal = false;
  bool quasi_iso = false;
  std::vector<int> failing_degrees;
  std::string witness;
  bool ok() const { return chain_map && multiplicative && kills_ideal && quasi_iso; }
};

AssocReport assoc_quasi_iso_check(const Cup1Algebra& c, const AlgebraPtr& target, const AssocMap& f);

nlohmann::ordered_json compile_report(const nlohmann::ordered_json& doc);

/// The document is a cup-1 presentation whose cup1 block has a "maps" array of
/// {"name", "target", "images"}; targets are presentation files resolved
/// against `base`.
nlohmann::ordered_json assoc_check_report(const nlohmann::ordered_json& doc, const std::filesystem::path& base);

}  // namespace obstrukt::cup1
