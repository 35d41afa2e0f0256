#pragma once

// Exact linear algebra over the prime field F_p.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obstrukt/error.hpp"

namespace obstrukt {

using Scalar = std::uint32_t;

/// A prime modulus. Construction checks primality; p must fit in 16 bits so
/// that products of reduced scalars never overflow 64-bit intermediates.
class Prime {
 public:
  explicit Prime(std::uint32_t p);

  std::uint32_t value() const noexcept { return p_; }
  bool is_two() const noexcept { return p_ == 2; }

  Scalar reduce(std::int64_t x) const noexcept {
    std::int64_t r = x % static_cast<std::int64_t>(p_);
    return static_cast<Scalar>(r < 0 ? r + p_ : r);
  }
  Scalar add(Scalar a, Scalar b) const noexcept {
    Scalar s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Scalar sub(Scalar a, Scalar b) const noexcept { return a >= b ? a - b : a + p_ - b; }
  Scalar neg(Scalar a) const noexcept { return a == 0 ? 0 : p_ - a; }
  Scalar mul(Scalar a, Scalar b) const noexcept {
    return static_cast<Scalar>((std::uint64_t{a} * b) % p_);
  }
  Scalar pow(Scalar a, std::uint64_t e) const noexcept;
  Scalar inv(Scalar a) const;

  friend bool operator==(const Prime&, const Prime&) = default;

 private:
  std::uint32_t p_;
};

bool is_prime(std::uint32_t n) noexcept;

/// Dense vector over F_p. The modulus travels with the value.
class FpVector {
 public:
  FpVector(Prime p, std::size_t n) : p_(p), v_(n, 0) {}
  FpVector(Prime p, std::vector<Scalar> entries);

  static FpVector unit(Prime p, std::size_t n, std::size_t i) {
    FpVector e(p, n);
    e.v_[i] = 1;
    return e;
  }

  Prime prime() const noexcept { return p_; }
  std::size_t size() const noexcept { return v_.size(); }
  Scalar operator[](std::size_t i) const { return v_[i]; }
  Scalar& operator[](std::size_t i) { return v_[i]; }
  std::span<const Scalar> entries() const noexcept { return v_; }
  std::span<Scalar> entries() noexcept { return v_; }

  bool is_zero() const noexcept;
  /// this += c * other
  void axpy(Scalar c, const FpVector& other);
  void scale(Scalar c);
  FpVector operator+(const FpVector& o) const;
  FpVector operator-(const FpVector& o) const;
  FpVector operator-() const;
  FpVector& operator+=(const FpVector& o) {
    axpy(1, o);
    return *this;
  }

  std::string str() const;

  friend bool operator==(const FpVector& a, const FpVector& b) {
    return a.p_ == b.p_ && a.v_ == b.v_;
  }
  friend auto operator<=>(const FpVector& a, const FpVector& b) { return a.v_ <=> b.v_; }

 private:
  Prime p_;
  std::vector<Scalar> v_;
};

void check_same_prime(Prime a, Prime b);

/// Dense row-major matrix over F_p.
class FpMatrix {
 public:
  FpMatrix(Prime p, std::size_t rows, std::size_t cols)
      : p_(p), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static FpMatrix identity(Prime p, std::size_t n);
  static FpMatrix from_rows(Prime p, std::size_t cols, std::span<const FpVector> rows);
  static FpMatrix from_columns(Prime p, std::size_t rows, std::span<const FpVector> cols);

  Prime prime() const noexcept { return p_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Scalar operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Scalar& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const Scalar> row_span(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  FpVector row(std::size_t r) const;
  FpVector column(std::size_t c) const;

  FpVector apply(const FpVector& x) const;
  FpMatrix operator*(const FpMatrix& o) const;
  FpMatrix transpose() const;
  bool is_zero() const noexcept;

  friend bool operator==(const FpMatrix&, const FpMatrix&) = default;

 private:
  Prime p_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Scalar> data_;
};

struct RrefResult {
  FpMatrix reduced;
  std::vector<std::size_t> pivots;
  std::size_t rank;
};

RrefResult rref(const FpMatrix& m);
std::size_t rank(const FpMatrix& m);

/// Affine subset {point + span(directions)} of F_p^dim, or the empty set.
class AffineSet {
 public:
  static AffineSet empty(Prime p, std::size_t dim) { return AffineSet(p, dim, std::nullopt, {}); }
  AffineSet(Prime p, std::size_t dim, std::optional<FpVector> point, std::vector<FpVector> directions);

  Prime prime() const noexcept { return p_; }
  std::size_t dim() const noexcept { return dim_; }
  bool is_empty() const noexcept { return !point_.has_value(); }
  const FpVector& point() const;
  const std::vector<FpVector>& directions() const noexcept { return directions_; }

  /// Number of elements, or nullopt when it exceeds `bound`.
  std::optional<std::uint64_t> cardinality(std::uint64_t bound = UINT64_MAX) const;
  bool contains(const FpVector& x) const;
  /// Visits every element; returns false early if the visitor does.
  void for_each(const std::function<bool(const FpVector&)>& visit) const;

 private:
  Prime p_;
  std::size_t dim_;
  std::optional<FpVector> point_;
  std::vector<FpVector> directions_;
};

/// A linear subspace held in reduced row echelon form. All derived data
/// (bases, representatives, coordinates) is canonical.
class Subspace {
 public:
  Subspace(Prime p, std::size_t ambient) : p_(p), ambient_(ambient) {}
  static Subspace span(Prime p, std::size_t ambient, std::span<const FpVector> vectors);
  static Subspace full(Prime p, std::size_t ambient);

  Prime prime() const noexcept { return p_; }
  std::size_t ambient() const noexcept { return ambient_; }
  std::size_t dim() const noexcept { return basis_.size(); }
  const std::vector<FpVector>& basis() const noexcept { return basis_; }
  const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

  /// Canonical representative of v modulo this subspace (zero at every pivot).
  FpVector reduce(const FpVector& v) const;
  bool contains(const FpVector& v) const { return reduce(v).is_zero(); }
  /// Coordinates of v along the RREF basis; v must lie in the subspace.
  FpVector coordinates(const FpVector& v) const;
  bool contains(const Subspace& other) const;

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.p_ == b.p_ && a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }

 private:
  Prime p_;
  std::size_t ambient_;
  std::vector<FpVector> basis_;
  std::vector<std::size_t> pivots_;
};

std::vector<FpVector> kernel_basis(const FpMatrix& m);
Subspace kernel(const FpMatrix& m);
std::vector<FpVector> image_basis(const FpMatrix& m);
Subspace image(const FpMatrix& m);
AffineSet solve_affine(const FpMatrix& m, const FpVector& b);
std::vector<FpVector> subspace_sum(std::span<const FpVector> a, std::span<const FpVector> b);
Subspace sum(const Subspace& a, const Subspace& b);
Subspace intersection(const Subspace& a, const Subspace& b);

/// Quotient of the ambient space by `sub`: complement representatives are the
/// standard basis vectors at non-pivot positions.
struct QuotientMap {
  Subspace sub;
  std::vector<std::size_t> complement;  // non-pivot coordinates

  std::size_t dim() const noexcept { return complement.size(); }
  std::vector<FpVector> representatives() const;
  FpVector project(const FpVector& v) const;
};

QuotientMap quotient_coords(Prime p, std::span<const FpVector> sub, std::size_t ambient);

/// Quotient super/sub for nested subspaces sub ⊆ super (cocycles modulo
/// coboundaries). Representatives are RREF rows of `super` whose pivots are
/// not pivots of `sub`, reduced modulo `sub`.
class RelativeQuotient {
 public:
  RelativeQuotient(Subspace sub, Subspace super);

  std::size_t dim() const noexcept { return reps_.size(); }
  const std::vector<FpVector>& representatives() const noexcept { return reps_; }
  const Subspace& sub() const noexcept { return sub_; }
  const Subspace& super() const noexcept { return super_; }
  /// Coordinates of the class of v; v must lie in `super`.
  FpVector project(const FpVector& v) const;
  /// Representative of the class with the given coordinates.
  FpVector lift(const FpVector& coords) const;

 private:
  Subspace sub_;
  Subspace super_;
  std::vector<std::size_t> complement_;
  std::vector<FpVector> reps_;
};

}  // namespace obstrukt
