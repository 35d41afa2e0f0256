#pragma once

// Secondary and higher products on the cohomology of a compiled dg-algebra:
// Massey triple products, type 1 / type 2 Frobenius products, higher order
// type 1 products, and a brute-force oracle that enumerates defining systems.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "obstrukt/dgalg.hpp"

namespace obstrukt {

/// A cohomology class: coordinates over the canonical basis of H^degree.
struct HClass {
  int degree = 0;
  FpVector coords;
  friend bool operator==(const HClass&, const HClass&) = default;
};

HClass class_of(const CohomologyRing& h, const Element& cocycle);
HClass basis_class(const CohomologyRing& h, int n, std::size_t i);
/// Class of a cocycle written as a polynomial in the generators.
HClass parse_class(const CohomologyRing& h, const std::string& text);

enum class ProductMode { Affine, Enumerated, Undefined };
std::string_view to_string(ProductMode m);

struct ProductSet {
  int degree = 0;
  ProductMode mode = ProductMode::Undefined;
  /// Affine: representative + span(indeterminacy). Enumerated: `elements`.
  std::optional<FpVector> representative;
  std::optional<Subspace> indeterminacy;
  std::vector<FpVector> elements;
  /// The closed-form indeterminacy quoted for the operation, when it differs
  /// from the exact variation over defining systems.
  std::optional<Subspace> stated_indeterminacy;
  /// Set when the answer covers only part of the defining systems.
  bool partial = false;
  std::string witness;

  bool defined() const noexcept { return mode != ProductMode::Undefined; }
  bool contains(const FpVector& cls) const;
  bool contains_zero() const;
  /// Explicit sorted list of the classes; nullopt if larger than `bound`.
  std::optional<std::vector<FpVector>> classes(std::uint64_t bound = 1u << 16) const;
};

/// Equality as subsets of H (undefined sets are equal to each other only).
bool same_set(const ProductSet& a, const ProductSet& b);
/// Equality of the images in H / q.
bool same_set_modulo(const ProductSet& a, const ProductSet& b, const Subspace& q);
/// Image of a product set under a linear map on H^degree.
ProductSet transport(const ProductSet& s, const FpMatrix& map);

struct ProductOptions {
  std::uint64_t enumeration_bound = std::uint64_t{1} << 20;
};

ProductSet massey_triple(const CohomologyRing& h, const HClass& x, const HClass& y, const HClass& z,
                         const ProductOptions& opts = {});

ProductSet frobenius_type1(const CohomologyRing& h, const HClass& x, const HClass& y,
                           const ProductOptions& opts = {});

enum class IndeterminacyKind {
  /// Exact variation over all defining systems: F(H^m) + F(x) Q(C^{|y|-1}) + F(y) Q(C^{|x|-1}),
  /// with Q(L) = [L^p] over all cochains L.
  Exact,
  /// The quoted closed form: F(H^m) + F(x) H^{p(|y|-1)} + F(y) H^{p(|x|-1)}.
  Stated,
};
Subspace indeterminacy_type1(const CohomologyRing& h, const HClass& x, const HClass& y,
                             IndeterminacyKind kind = IndeterminacyKind::Exact);

ProductSet frobenius_type2(const CohomologyRing& h, const HClass& x, const HClass& y,
                           const ProductOptions& opts = {});

/// Order n >= 2; order 2 is frobenius_type1.
ProductSet higher_frobenius_type1(const CohomologyRing& h, const HClass& x, const HClass& y, int order,
                                  const ProductOptions& opts = {});

/// Values of the order-n type 1 product over all lifts for the fixed cocycle
/// representatives a, b (no variation of a or b).
ProductSet type1_for_cocycles(const CohomologyRing& h, const Element& a, const Element& b, int order = 2);

struct StrictReport {
  bool strict = false;
  /// Degrees whose cohomology had to vanish but does not.
  std::vector<int> failing_degrees;
  std::string witness;
  /// The closed-form indeterminacy of the order-n product, when strict.
  std::optional<Subspace> indeterminacy;
};
StrictReport strictly_defined(const CohomologyRing& h, const HClass& x, const HClass& y, int order,
                              const ProductOptions& opts = {});

enum class ProductKind { Massey, FrobeniusType1, FrobeniusType2, HigherType1 };

struct ProductQuery {
  ProductKind kind = ProductKind::FrobeniusType1;
  std::vector<HClass> classes;
  int order = 2;
};

ProductSet compute_product(const CohomologyRing& h, const ProductQuery& q, const ProductOptions& opts = {});

/// Enumerates every representative and lift choice and applies the defining
/// formula literally. Throws TooLarge beyond opts.enumeration_bound.
ProductSet bruteforce_oracle(const CohomologyRing& h, const ProductQuery& q, const ProductOptions& opts = {});

std::string render(const CohomologyRing& h, const ProductSet& s);

}  // namespace obstrukt
