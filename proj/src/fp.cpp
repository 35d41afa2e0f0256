#include "obstrukt/fp.hpp"

#include <algorithm>
#include <sstream>

namespace obstrukt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::ModulusMismatch: return "ModulusMismatch";
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IllFormedDifferential: return "IllFormedDifferential";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::NotAMorphism: return "NotAMorphism";
    case ErrorCode::ProductsNonzero: return "ProductsNonzero";
    case ErrorCode::OddPrimeRequired: return "OddPrimeRequired";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NotSurjective: return "NotSurjective";
    case ErrorCode::NotQuasiIso: return "NotQuasiIso";
    case ErrorCode::NotACocycle: return "NotACocycle";
    case ErrorCode::NotInIdeal: return "NotInIdeal";
    case ErrorCode::NotAStaircase: return "NotAStaircase";
    case ErrorCode::NotAChainMap: return "NotAChainMap";
    case ErrorCode::NotMultiplicative: return "NotMultiplicative";
    case ErrorCode::UnknownEntry: return "UnknownEntry";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_prime(std::uint32_t n) noexcept {
  if (n < 2) return false;
  for (std::uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

Prime::Prime(std::uint32_t p) : p_(p) {
  if (!is_prime(p) || p >= (1u << 16))
    throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not a supported prime");
}

Scalar Prime::pow(Scalar a, std::uint64_t e) const noexcept {
  Scalar result = 1 % p_;
  Scalar base = a % p_;
  while (e) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }
  return result;
}

Scalar Prime::inv(Scalar a) const {
  if (a % p_ == 0) throw Error(ErrorCode::InvalidArgument, "inverse of zero");
  return pow(a, p_ - 2);
}

void check_same_prime(Prime a, Prime b) {
  if (!(a == b))
    throw Error(ErrorCode::ModulusMismatch,
                "F_" + std::to_string(a.value()) + " vs F_" + std::to_string(b.value()));
}

// ---------------------------------------------------------------------------

FpVector::FpVector(Prime p, std::vector<Scalar> entries) : p_(p), v_(std::move(entries)) {
  for (auto& x : v_) x %= p.value();
}

bool FpVector::is_zero() const noexcept {
  return std::all_of(v_.begin(), v_.end(), [](Scalar x) { return x == 0; });
}

void FpVector::axpy(Scalar c, const FpVector& other) {
  check_same_prime(p_, other.p_);
  if (other.size() != size()) throw Error(ErrorCode::InvalidDimension, "axpy length mismatch");
  if (c == 0) return;
  for (std::size_t i = 0; i < v_.size(); ++i)
    if (other.v_[i]) v_[i] = p_.add(v_[i], p_.mul(c, other.v_[i]));
}

void FpVector::scale(Scalar c) {
  for (auto& x : v_) x = p_.mul(x, c);
}

FpVector FpVector::operator+(const FpVector& o) const {
  FpVector r = *this;
  r.axpy(1, o);
  return r;
}

FpVector FpVector::operator-(const FpVector& o) const {
  FpVector r = *this;
  r.axpy(p_.value() - 1, o);
  return r;
}

FpVector FpVector::operator-() const {
  FpVector r = *this;
  r.scale(p_.value() - 1);
  return r;
}

std::string FpVector::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v_.size(); ++i) os << (i ? " " : "") << v_[i];
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------

FpMatrix FpMatrix::identity(Prime p, std::size_t n) {
  FpMatrix m(p, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

FpMatrix FpMatrix::from_rows(Prime p, std::size_t cols, std::span<const FpVector> rows) {
  FpMatrix m(p, rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    check_same_prime(p, rows[r].prime());
    if (rows[r].size() != cols) throw Error(ErrorCode::InvalidDimension, "row length mismatch");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

FpMatrix FpMatrix::from_columns(Prime p, std::size_t rows, std::span<const FpVector> cols) {
  FpMatrix m(p, rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    check_same_prime(p, cols[c].prime());
    if (cols[c].size() != rows) throw Error(ErrorCode::InvalidDimension, "column length mismatch");
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = cols[c][r];
  }
  return m;
}

FpVector FpMatrix::row(std::size_t r) const {
  return FpVector(p_, std::vector<Scalar>(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_));
}

FpVector FpMatrix::column(std::size_t c) const {
  FpVector v(p_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

FpVector FpMatrix::apply(const FpVector& x) const {
  check_same_prime(p_, x.prime());
  if (x.size() != cols_) throw Error(ErrorCode::InvalidDimension, "matrix-vector size mismatch");
  FpVector y(p_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::uint64_t acc = 0;
    for (std::size_t c = 0; c < cols_; ++c) {
      acc += std::uint64_t{(*this)(r, c)} * x[c];
      if (acc >= (1ull << 62)) acc %= p_.value();
    }
    y[r] = static_cast<Scalar>(acc % p_.value());
  }
  return y;
}

FpMatrix FpMatrix::operator*(const FpMatrix& o) const {
  check_same_prime(p_, o.p_);
  if (cols_ != o.rows_) throw Error(ErrorCode::InvalidDimension, "matrix product size mismatch");
  FpMatrix m(p_, rows_, o.cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < cols_; ++k) {
      Scalar a = (*this)(r, k);
      if (!a) continue;
      for (std::size_t c = 0; c < o.cols_; ++c)
        m(r, c) = p_.add(m(r, c), p_.mul(a, o(k, c)));
    }
  return m;
}

FpMatrix FpMatrix::transpose() const {
  FpMatrix t(p_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool FpMatrix::is_zero() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](Scalar x) { return x == 0; });
}

// ---------------------------------------------------------------------------

RrefResult rref(const FpMatrix& m) {
  const Prime p = m.prime();
  FpMatrix a = m;
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t sel = row;
    while (sel < a.rows() && a(sel, col) == 0) ++sel;
    if (sel == a.rows()) continue;
    if (sel != row)
      for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a(sel, c), a(row, c));
    const Scalar inv = p.inv(a(row, col));
    for (std::size_t c = col; c < a.cols(); ++c) a(row, c) = p.mul(a(row, c), inv);
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (r == row || a(r, col) == 0) continue;
      const Scalar f = p.neg(a(r, col));
      for (std::size_t c = col; c < a.cols(); ++c)
        if (a(row, c)) a(r, c) = p.add(a(r, c), p.mul(f, a(row, c)));
    }
    pivots.push_back(col);
    ++row;
  }
  const std::size_t r = pivots.size();
  return {std::move(a), std::move(pivots), r};
}

std::size_t rank(const FpMatrix& m) { return rref(m).rank; }

// ---------------------------------------------------------------------------

AffineSet::AffineSet(Prime p, std::size_t dim, std::optional<FpVector> point,
                     std::vector<FpVector> directions)
    : p_(p), dim_(dim), point_(std::move(point)), directions_(std::move(directions)) {
  if (!point_) directions_.clear();
}

const FpVector& AffineSet::point() const {
  if (!point_) throw Error(ErrorCode::InvalidArgument, "empty affine set has no point");
  return *point_;
}

std::optional<std::uint64_t> AffineSet::cardinality(std::uint64_t bound) const {
  if (!point_) return 0;
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < directions_.size(); ++i) {
    if (n > bound / p_.value()) return std::nullopt;
    n *= p_.value();
  }
  if (n > bound) return std::nullopt;
  return n;
}

bool AffineSet::contains(const FpVector& x) const {
  if (!point_) return false;
  Subspace dirs = Subspace::span(p_, dim_, directions_);
  return dirs.contains(x - *point_);
}

void AffineSet::for_each(const std::function<bool(const FpVector&)>& visit) const {
  if (!point_) return;
  const std::size_t k = directions_.size();
  std::vector<Scalar> coeff(k, 0);
  FpVector cur = *point_;
  while (true) {
    if (!visit(cur)) return;
    // odometer increment, updating `cur` incrementally
    std::size_t i = 0;
    while (i < k) {
      cur.axpy(1, directions_[i]);
      if (++coeff[i] < p_.value()) break;
      coeff[i] = 0;  // wrapped: p additions returned this digit to zero
      ++i;
    }
    if (i == k) return;
  }
}

// ---------------------------------------------------------------------------

Subspace Subspace::span(Prime p, std::size_t ambient, std::span<const FpVector> vectors) {
  Subspace s(p, ambient);
  if (vectors.empty()) return s;
  auto r = rref(FpMatrix::from_rows(p, ambient, vectors));
  for (std::size_t i = 0; i < r.rank; ++i) s.basis_.push_back(r.reduced.row(i));
  s.pivots_ = std::move(r.pivots);
  return s;
}

Subspace Subspace::full(Prime p, std::size_t ambient) {
  Subspace s(p, ambient);
  for (std::size_t i = 0; i < ambient; ++i) {
    s.basis_.push_back(FpVector::unit(p, ambient, i));
    s.pivots_.push_back(i);
  }
  return s;
}

FpVector Subspace::reduce(const FpVector& v) const {
  check_same_prime(p_, v.prime());
  if (v.size() != ambient_) throw Error(ErrorCode::InvalidDimension, "reduce: ambient mismatch");
  FpVector r = v;
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const Scalar c = r[pivots_[i]];
    if (c) r.axpy(p_.neg(c), basis_[i]);
  }
  return r;
}

FpVector Subspace::coordinates(const FpVector& v) const {
  if (!contains(v)) throw Error(ErrorCode::InvalidArgument, "vector not in subspace");
  FpVector c(p_, basis_.size());
  for (std::size_t i = 0; i < basis_.size(); ++i) c[i] = v[pivots_[i]];
  return c;
}

bool Subspace::contains(const Subspace& other) const {
  return std::all_of(other.basis_.begin(), other.basis_.end(),
                     [&](const FpVector& v) { return contains(v); });
}

std::vector<FpVector> kernel_basis(const FpMatrix& m) { return kernel(m).basis(); }

Subspace kernel(const FpMatrix& m) {
  const Prime p = m.prime();
  auto r = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : r.pivots) is_pivot[c] = true;
  std::vector<FpVector> vecs;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    FpVector v = FpVector::unit(p, m.cols(), f);
    for (std::size_t i = 0; i < r.rank; ++i) v[r.pivots[i]] = p.neg(r.reduced(i, f));
    vecs.push_back(std::move(v));
  }
  return Subspace::span(p, m.cols(), vecs);
}

std::vector<FpVector> image_basis(const FpMatrix& m) { return image(m).basis(); }

Subspace image(const FpMatrix& m) {
  std::vector<FpVector> cols;
  cols.reserve(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) cols.push_back(m.column(c));
  return Subspace::span(m.prime(), m.rows(), cols);
}

AffineSet solve_affine(const FpMatrix& m, const FpVector& b) {
  const Prime p = m.prime();
  check_same_prime(p, b.prime());
  if (b.size() != m.rows()) throw Error(ErrorCode::InvalidDimension, "solve_affine: rhs length");
  FpMatrix aug(p, m.rows(), m.cols() + 1);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) aug(r, c) = m(r, c);
    aug(r, m.cols()) = b[r];
  }
  auto red = rref(aug);
  if (!red.pivots.empty() && red.pivots.back() == m.cols()) return AffineSet::empty(p, m.cols());
  FpVector point(p, m.cols());
  for (std::size_t i = 0; i < red.rank; ++i) point[red.pivots[i]] = red.reduced(i, m.cols());
  return AffineSet(p, m.cols(), std::move(point), kernel(m).basis());
}

std::vector<FpVector> subspace_sum(std::span<const FpVector> a, std::span<const FpVector> b) {
  if (a.empty() && b.empty()) return {};
  const FpVector& probe = a.empty() ? b.front() : a.front();
  std::vector<FpVector> all(a.begin(), a.end());
  for (const auto& v : b) {
    if (v.size() != probe.size()) throw Error(ErrorCode::InvalidDimension, "subspace_sum");
    all.push_back(v);
  }
  return Subspace::span(probe.prime(), probe.size(), all).basis();
}

Subspace sum(const Subspace& a, const Subspace& b) {
  check_same_prime(a.prime(), b.prime());
  if (a.ambient() != b.ambient()) throw Error(ErrorCode::InvalidDimension, "sum: ambient mismatch");
  std::vector<FpVector> all = a.basis();
  all.insert(all.end(), b.basis().begin(), b.basis().end());
  return Subspace::span(a.prime(), a.ambient(), all);
}

Subspace intersection(const Subspace& a, const Subspace& b) {
  check_same_prime(a.prime(), b.prime());
  if (a.ambient() != b.ambient())
    throw Error(ErrorCode::InvalidDimension, "intersection: ambient mismatch");
  const Prime p = a.prime();
  // Solve sum_i s_i a_i - sum_j t_j b_j = 0; the a-part of each solution spans the intersection.
  const std::size_t na = a.dim(), nb = b.dim();
  FpMatrix m(p, a.ambient(), na + nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t r = 0; r < a.ambient(); ++r) m(r, i) = a.basis()[i][r];
  for (std::size_t j = 0; j < nb; ++j)
    for (std::size_t r = 0; r < a.ambient(); ++r) m(r, na + j) = p.neg(b.basis()[j][r]);
  std::vector<FpVector> vecs;
  const Subspace ker = kernel(m);
  for (const auto& k : ker.basis()) {
    FpVector v(p, a.ambient());
    for (std::size_t i = 0; i < na; ++i) v.axpy(k[i], a.basis()[i]);
    vecs.push_back(std::move(v));
  }
  return Subspace::span(p, a.ambient(), vecs);
}

std::vector<FpVector> QuotientMap::representatives() const {
  std::vector<FpVector> reps;
  for (auto c : complement) reps.push_back(FpVector::unit(sub.prime(), sub.ambient(), c));
  return reps;
}

FpVector QuotientMap::project(const FpVector& v) const {
  FpVector r = sub.reduce(v);
  FpVector out(sub.prime(), complement.size());
  for (std::size_t i = 0; i < complement.size(); ++i) out[i] = r[complement[i]];
  return out;
}

QuotientMap quotient_coords(Prime p, std::span<const FpVector> sub, std::size_t ambient) {
  for (const auto& v : sub)
    if (v.size() != ambient) throw Error(ErrorCode::InvalidDimension, "quotient_coords");
  QuotientMap q{Subspace::span(p, ambient, sub), {}};
  std::vector<bool> piv(ambient, false);
  for (auto c : q.sub.pivots()) piv[c] = true;
  for (std::size_t i = 0; i < ambient; ++i)
    if (!piv[i]) q.complement.push_back(i);
  return q;
}

RelativeQuotient::RelativeQuotient(Subspace sub, Subspace super)
    : sub_(std::move(sub)), super_(std::move(super)) {
  if (!super_.contains(sub_)) throw Error(ErrorCode::InvalidArgument, "quotient: sub not contained in super");
  // Reduced super vectors vanish on the sub pivots; their echelon form gives
  // canonical representatives whose pivots read off quotient coordinates.
  std::vector<FpVector> reduced;
  for (const auto& v : super_.basis()) reduced.push_back(sub_.reduce(v));
  Subspace r = Subspace::span(super_.prime(), super_.ambient(), reduced);
  reps_ = r.basis();
  complement_ = r.pivots();
}

FpVector RelativeQuotient::project(const FpVector& v) const {
  FpVector w = sub_.reduce(v);
  FpVector out(sub_.prime(), complement_.size());
  for (std::size_t i = 0; i < complement_.size(); ++i) out[i] = w[complement_[i]];
  return out;
}

FpVector RelativeQuotient::lift(const FpVector& coords) const {
  if (coords.size() != reps_.size()) throw Error(ErrorCode::InvalidDimension, "lift: coordinate length");
  FpVector v(sub_.prime(), sub_.ambient());
  for (std::size_t i = 0; i < reps_.size(); ++i) v.axpy(coords[i], reps_[i]);
  return v;
}

}  // namespace obstrukt
