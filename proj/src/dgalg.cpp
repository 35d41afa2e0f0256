#include "obstrukt/dgalg.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "obstrukt/polystring.hpp"

namespace obstrukt {

// ---------------------------------------------------------------------------
// FreeMonoid

FreeMonoid::FreeMonoid(Prime p, std::vector<int> degrees) : p_(p), degrees_(std::move(degrees)) {}

int FreeMonoid::degree(const Exponents& e) const {
  int d = 0;
  for (std::size_t i = 0; i < e.size(); ++i) d += degrees_[i] * e[i];
  return d;
}

bool FreeMonoid::admissible(const Exponents& e) const {
  if (p_.is_two()) return true;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (degrees_[i] % 2 != 0 && e[i] > 1) return false;
  return true;
}

Exponents FreeMonoid::generator(std::size_t gen) const {
  Exponents e(degrees_.size(), 0);
  e[gen] = 1;
  return e;
}

std::pair<Scalar, Exponents> FreeMonoid::multiply(const Exponents& a, const Exponents& b) const {
  Exponents r(degrees_.size(), 0);
  unsigned swaps = 0;
  unsigned odd_in_a_after = 0;  // odd-degree factors of a with index > i
  for (std::size_t k = degrees_.size(); k-- > 0;) {
    const bool odd = degrees_[k] % 2 != 0;
    if (odd) {
      if (!p_.is_two() && a[k] + b[k] > 1) return {0, {}};
      swaps += odd_in_a_after * b[k];
      odd_in_a_after += a[k];
    }
    r[k] = static_cast<std::uint16_t>(a[k] + b[k]);
  }
  const Scalar sign = (swaps % 2 == 0 || p_.is_two()) ? 1 : p_.value() - 1;
  return {sign, std::move(r)};
}

void add_to(SparsePoly& acc, const SparsePoly& other, Scalar coeff, Prime p) {
  if (coeff == 0) return;
  for (const auto& [m, c] : other) {
    Scalar& slot = acc[m];
    slot = p.add(slot, p.mul(c, coeff));
    if (slot == 0) acc.erase(m);
  }
}

SparsePoly FreeMonoid::multiply(const SparsePoly& a, const SparsePoly& b) const {
  SparsePoly out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      auto [s, m] = multiply(ma, mb);
      if (!s) continue;
      Scalar& slot = out[m];
      slot = p_.add(slot, p_.mul(s, p_.mul(ca, cb)));
      if (slot == 0) out.erase(m);
    }
  return out;
}

std::vector<Exponents> FreeMonoid::monomials_of_degree(int n) const {
  std::vector<Exponents> out;
  Exponents cur(degrees_.size(), 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int remaining) {
    if (i == degrees_.size()) {
      if (remaining == 0) out.push_back(cur);
      return;
    }
    const int maxe = (!p_.is_two() && degrees_[i] % 2 != 0) ? 1 : remaining / degrees_[i];
    for (int e = 0; e <= maxe && e * degrees_[i] <= remaining; ++e) {
      cur[i] = static_cast<std::uint16_t>(e);
      rec(i + 1, remaining - e * degrees_[i]);
    }
    cur[i] = 0;
  };
  if (n >= 0) rec(0, n);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

SparsePoly to_sparse_poly(const poly::Poly& expr, const FreeMonoid& monoid,
                          const std::map<std::string, std::size_t>& names) {
  const Prime p = monoid.prime();
  SparsePoly out;
  for (const auto& term : expr.terms) {
    SparsePoly acc{{Exponents(monoid.size(), 0), p.reduce(term.coeff)}};
    for (const auto& f : term.factors) {
      if (f.kind != poly::Factor::Kind::Name)
        throw poly::ParseError(f.column, "cup1 syntax is not valid in a commutative presentation");
      auto it = names.find(f.name);
      if (it == names.end()) throw poly::ParseError(f.column, "unknown generator '" + f.name + "'");
      const SparsePoly g{{monoid.generator(it->second), 1}};
      for (unsigned k = 0; k < f.exponent; ++k) acc = monoid.multiply(acc, g);
    }
    add_to(out, acc, 1, p);
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

std::optional<int> homogeneous_degree(const SparsePoly& poly, const FreeMonoid& monoid,
                                      const std::string& what) {
  std::optional<int> deg;
  for (const auto& [m, c] : poly) {
    const int d = monoid.degree(m);
    if (deg && *deg != d) throw Error(ErrorCode::InvalidArgument, what + " is not homogeneous");
    deg = d;
  }
  return deg;
}

}  // namespace

AlgebraPtr DgAlgebra::compile(const Presentation& pres, const CompileOptions& opts) {
  const Prime p(pres.prime);
  std::map<std::string, std::size_t> names;
  std::vector<int> degrees;
  int max_degree = 0;
  for (const auto& g : pres.generators) {
    if (g.degree < 1) throw Error(ErrorCode::InvalidArgument, "generator '" + g.name + "' must have degree >= 1");
    if (!names.emplace(g.name, degrees.size()).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate generator '" + g.name + "'");
    degrees.push_back(g.degree);
    max_degree = std::max(max_degree, g.degree);
  }
  if (pres.degree_cap < max_degree)
    throw Error(ErrorCode::InvalidArgument, "degree cap below the largest generator degree");

  std::shared_ptr<DgAlgebra> alg(new DgAlgebra(pres, FreeMonoid(p, degrees)));
  const FreeMonoid& monoid = alg->monoid_;
  const int cap = pres.degree_cap;

  alg->gen_differential_.resize(degrees.size());
  for (const auto& [name, text] : pres.differential) {
    auto it = names.find(name);
    if (it == names.end()) throw Error(ErrorCode::InvalidArgument, "differential of unknown generator '" + name + "'");
    SparsePoly dg = to_sparse_poly(poly::parse(text), monoid, names);
    auto deg = homogeneous_degree(dg, monoid, "d(" + name + ")");
    if (deg && *deg != degrees[it->second] + 1)
      throw Error(ErrorCode::InvalidArgument, "d(" + name + ") has degree " + std::to_string(*deg) +
                                                  ", expected " + std::to_string(degrees[it->second] + 1));
    if (!dg.empty()) alg->gen_differential_[it->second] = std::move(dg);
  }
  std::vector<int> rel_degree;
  for (std::size_t r = 0; r < pres.relations.size(); ++r) {
    SparsePoly rel = to_sparse_poly(poly::parse(pres.relations[r]), monoid, names);
    auto deg = homogeneous_degree(rel, monoid, "relation '" + pres.relations[r] + "'");
    alg->relations_.push_back(rel);
    rel_degree.push_back(deg.value_or(-1));
  }

  alg->degrees_.reserve(cap + 1);
  for (int n = 0; n <= cap; ++n) {
    Degree dg{monoid.monomials_of_degree(n), {}, Subspace(p, 0), {}, {}};
    for (std::size_t i = 0; i < dg.monomials.size(); ++i) dg.index.emplace(dg.monomials[i], i);
    std::vector<FpVector> rows;
    for (std::size_t r = 0; r < alg->relations_.size(); ++r) {
      if (rel_degree[r] < 0 || rel_degree[r] > n) continue;
      for (const auto& m : alg->degrees_.empty() && n - rel_degree[r] == 0
                               ? std::vector<Exponents>{Exponents(degrees.size(), 0)}
                               : (n - rel_degree[r] < static_cast<int>(alg->degrees_.size())
                                      ? alg->degrees_[n - rel_degree[r]].monomials
                                      : monoid.monomials_of_degree(n - rel_degree[r]))) {
        SparsePoly prod = monoid.multiply(SparsePoly{{m, 1}}, alg->relations_[r]);
        FpVector v(p, dg.monomials.size());
        for (const auto& [e, c] : prod) v[dg.index.at(e)] = c;
        if (!v.is_zero()) rows.push_back(std::move(v));
      }
    }
    dg.ideal = Subspace::span(p, dg.monomials.size(), rows);
    std::vector<long> pivot_row(dg.monomials.size(), -1);
    for (std::size_t i = 0; i < dg.ideal.pivots().size(); ++i) pivot_row[dg.ideal.pivots()[i]] = static_cast<long>(i);
    std::vector<long> basis_pos(dg.monomials.size(), -1);
    for (std::size_t j = 0; j < dg.monomials.size(); ++j)
      if (pivot_row[j] < 0) {
        basis_pos[j] = static_cast<long>(dg.basis.size());
        dg.basis.push_back(j);
      }
    for (std::size_t j = 0; j < dg.monomials.size(); ++j) {
      FpVector nf(p, dg.basis.size());
      if (pivot_row[j] < 0) {
        nf[basis_pos[j]] = 1;
      } else {
        const FpVector& row = dg.ideal.basis()[pivot_row[j]];
        for (std::size_t b = 0; b < dg.basis.size(); ++b) nf[b] = p.neg(row[dg.basis[b]]);
      }
      dg.normal_form.push_back(std::move(nf));
    }
    alg->degrees_.push_back(std::move(dg));
  }

  // The differential must preserve the ideal; it suffices to check d(r) for each relation.
  for (std::size_t r = 0; r < alg->relations_.size(); ++r) {
    if (rel_degree[r] < 0 || rel_degree[r] + 1 > cap) continue;
    SparsePoly dr;
    for (const auto& [m, c] : alg->relations_[r]) add_to(dr, alg->free_differential(m), c, p);
    FpVector v = alg->sparse_to_monomial_coords(dr, rel_degree[r] + 1);
    if (!alg->degrees_[rel_degree[r] + 1].ideal.contains(v)) {
      std::ostringstream os;
      os << "d(" << pres.relations[r] << ") is not in the ideal of relations";
      throw Error(ErrorCode::IllFormedDifferential, os.str());
    }
  }
  for (std::size_t g = 0; g < degrees.size(); ++g) {
    if (!alg->gen_differential_[g] || degrees[g] + 2 > cap) continue;
    SparsePoly ddg;
    for (const auto& [m, c] : *alg->gen_differential_[g]) add_to(ddg, alg->free_differential(m), c, p);
    if (!alg->degrees_[degrees[g] + 2].ideal.contains(alg->sparse_to_monomial_coords(ddg, degrees[g] + 2)))
      throw Error(ErrorCode::IllFormedDifferential, "d(d(" + pres.generators[g].name + ")) != 0");
  }

  for (int n = 0; n < cap; ++n) {
    const Degree& src = alg->degrees_[n];
    const Degree& dst = alg->degrees_[n + 1];
    FpMatrix dm(p, dst.basis.size(), src.basis.size());
    for (std::size_t j = 0; j < src.basis.size(); ++j) {
      FpVector col = alg->sparse_to_monomial_coords(alg->free_differential(src.monomials[src.basis[j]]), n + 1);
      FpVector nf(p, dst.basis.size());
      for (std::size_t k = 0; k < col.size(); ++k)
        if (col[k]) nf.axpy(col[k], dst.normal_form[k]);
      for (std::size_t i = 0; i < nf.size(); ++i) dm(i, j) = nf[i];
    }
    alg->d_.push_back(std::move(dm));
  }
  for (int n = 0; n + 1 < cap; ++n)
    if (!(alg->d_[n + 1] * alg->d_[n]).is_zero())
      throw Error(ErrorCode::IllFormedDifferential, "d^2 != 0 on degree " + std::to_string(n));

  if (opts.exhaustive_checks) {
    StructureReport rep = alg->verify_structure();
    if (!rep.ok()) throw Error(ErrorCode::IllFormedDifferential, "structure check failed: " + rep.witness);
  }
  return alg;
}

SparsePoly DgAlgebra::free_differential(const Exponents& e) const {
  auto hit = d_cache_.find(e);
  if (hit != d_cache_.end()) return hit->second;
  const Prime p = prime();
  SparsePoly out;
  std::size_t i = 0;
  while (i < e.size() && e[i] == 0) ++i;
  if (i < e.size()) {
    Exponents rest = e;
    --rest[i];
    if (gen_differential_[i]) add_to(out, monoid_.multiply(*gen_differential_[i], SparsePoly{{rest, 1}}), 1, p);
    const SparsePoly drest = free_differential(rest);
    if (!drest.empty()) {
      const Scalar sign = monoid_.degree(i) % 2 ? p.neg(1) : 1;
      add_to(out, monoid_.multiply(SparsePoly{{monoid_.generator(i), 1}}, drest), sign, p);
    }
  }
  d_cache_.emplace(e, out);
  return out;
}

FpVector DgAlgebra::sparse_to_monomial_coords(const SparsePoly& poly, int n) const {
  check_degree(n);
  const Degree& dg = degrees_[n];
  FpVector v(prime(), dg.monomials.size());
  for (const auto& [m, c] : poly) {
    auto it = dg.index.find(m);
    if (it == dg.index.end()) throw Error(ErrorCode::InvalidArgument, "monomial of wrong degree");
    v[it->second] = prime().add(v[it->second], c);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Element arithmetic

void DgAlgebra::check_degree(int n) const {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative degree");
  if (n > cap()) throw Error(ErrorCode::DegreeOverflow, "degree " + std::to_string(n) + " exceeds cap " + std::to_string(cap()));
}

std::optional<std::size_t> DgAlgebra::generator_index(const std::string& name) const {
  for (std::size_t i = 0; i < pres_.generators.size(); ++i)
    if (pres_.generators[i].name == name) return i;
  return std::nullopt;
}

std::size_t DgAlgebra::dim(int n) const {
  if (n < 0 || n > cap()) return 0;
  return degrees_[n].basis.size();
}

const Exponents& DgAlgebra::basis_monomial(int n, std::size_t i) const {
  check_degree(n);
  return degrees_[n].monomials[degrees_[n].basis.at(i)];
}

std::vector<Exponents> DgAlgebra::basis(int n) const {
  std::vector<Exponents> out;
  for (std::size_t i = 0; i < dim(n); ++i) out.push_back(basis_monomial(n, i));
  return out;
}

Element DgAlgebra::zero(int n) const {
  check_degree(n);
  return {n, FpVector(prime(), dim(n))};
}

Element DgAlgebra::one() const { return monomial(Exponents(generator_count(), 0)); }

Element DgAlgebra::basis_element(int n, std::size_t i) const {
  check_degree(n);
  return {n, FpVector::unit(prime(), dim(n), i)};
}

Element DgAlgebra::monomial(const Exponents& e) const {
  const int n = monoid_.degree(e);
  check_degree(n);
  if (!monoid_.admissible(e)) return zero(n);
  return {n, degrees_[n].normal_form[degrees_[n].index.at(e)]};
}

Element DgAlgebra::generator(std::size_t gen) const { return monomial(monoid_.generator(gen)); }

Element DgAlgebra::from_sparse(const SparsePoly& poly, int degree) const {
  Element out = zero(degree);
  for (const auto& [m, c] : poly) {
    if (monoid_.degree(m) != degree) throw Error(ErrorCode::InvalidArgument, "from_sparse: inhomogeneous");
    out.coords.axpy(c, degrees_[degree].normal_form[degrees_[degree].index.at(m)]);
  }
  return out;
}

SparsePoly DgAlgebra::to_sparse(const Element& u) const {
  SparsePoly out;
  for (std::size_t i = 0; i < u.coords.size(); ++i)
    if (u.coords[i]) out[basis_monomial(u.degree, i)] = u.coords[i];
  return out;
}

SparsePoly DgAlgebra::parse_sparse(const std::string& text) const {
  std::map<std::string, std::size_t> names;
  for (std::size_t i = 0; i < pres_.generators.size(); ++i) names.emplace(pres_.generators[i].name, i);
  return to_sparse_poly(poly::parse(text), monoid_, names);
}

Element DgAlgebra::parse(const std::string& text) const {
  SparsePoly sp = parse_sparse(text);
  auto deg = homogeneous_degree(sp, monoid_, "'" + text + "'");
  if (!deg) throw Error(ErrorCode::InvalidArgument, "'" + text + "' is zero; its degree is ambiguous");
  return from_sparse(sp, *deg);
}

Element DgAlgebra::parse(const std::string& text, int fallback_degree) const {
  SparsePoly sp = parse_sparse(text);
  auto deg = homogeneous_degree(sp, monoid_, "'" + text + "'");
  if (deg && *deg != fallback_degree)
    throw Error(ErrorCode::InvalidArgument, "'" + text + "' has degree " + std::to_string(*deg) +
                                                ", expected " + std::to_string(fallback_degree));
  return from_sparse(sp, fallback_degree);
}

Element DgAlgebra::multiply(const Element& u, const Element& v) const {
  const int n = u.degree + v.degree;
  check_degree(n);
  const Prime p = prime();
  Element out = zero(n);
  const Degree& dg = degrees_[n];
  for (std::size_t i = 0; i < u.coords.size(); ++i) {
    if (!u.coords[i]) continue;
    const Exponents& a = basis_monomial(u.degree, i);
    for (std::size_t j = 0; j < v.coords.size(); ++j) {
      if (!v.coords[j]) continue;
      auto [s, m] = monoid_.multiply(a, basis_monomial(v.degree, j));
      if (!s) continue;
      out.coords.axpy(p.mul(s, p.mul(u.coords[i], v.coords[j])), dg.normal_form[dg.index.at(m)]);
    }
  }
  return out;
}

Element DgAlgebra::power(const Element& u, unsigned k) const {
  check_degree(u.degree * static_cast<int>(k));
  Element out = one();
  for (unsigned i = 0; i < k; ++i) out = multiply(out, u);
  return out;
}

Element DgAlgebra::differential(const Element& u) const {
  if (u.degree >= cap()) throw Error(ErrorCode::DegreeOverflow, "differential out of degree " + std::to_string(u.degree));
  return {u.degree + 1, d_[u.degree].apply(u.coords)};
}

Element DgAlgebra::add(const Element& u, const Element& v) const {
  if (u.degree != v.degree) throw Error(ErrorCode::InvalidArgument, "adding elements of different degrees");
  return {u.degree, u.coords + v.coords};
}

Element DgAlgebra::scale(const Element& u, Scalar c) const {
  Element r = u;
  r.coords.scale(prime().reduce(c));
  return r;
}

const FpMatrix& DgAlgebra::d_matrix(int n) const {
  if (n < 0 || n >= cap()) throw Error(ErrorCode::DegreeOverflow, "no differential out of degree " + std::to_string(n));
  return d_[n];
}

AffineSet DgAlgebra::find_primitive(const Element& v) const {
  check_degree(v.degree);
  if (v.degree == 0) {
    return v.is_zero() ? AffineSet(prime(), 0, FpVector(prime(), 0), {}) : AffineSet::empty(prime(), 0);
  }
  return solve_affine(d_matrix(v.degree - 1), v.coords);
}

std::string DgAlgebra::monomial_string(const Exponents& e) const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!e[i]) continue;
    if (!first) os << '*';
    first = false;
    os << pres_.generators[i].name;
    if (e[i] > 1) os << '^' << e[i];
  }
  if (first) os << '1';
  return os.str();
}

std::string DgAlgebra::to_string(const Element& u) const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < u.coords.size(); ++i) {
    const Scalar c = u.coords[i];
    if (!c) continue;
    if (!first) os << " + ";
    first = false;
    if (c != 1) os << c << '*';
    os << monomial_string(basis_monomial(u.degree, i));
  }
  if (first) os << '0';
  return os.str();
}

StructureReport DgAlgebra::verify_structure() const {
  StructureReport rep;
  const Prime p = prime();
  const int D = cap();
  for (int n = 0; n + 1 < D; ++n)
    if (!(d_[n + 1] * d_[n]).is_zero()) {
      rep.d_squared_zero = false;
      rep.witness = "d^2 != 0 in degree " + std::to_string(n);
    }
  for (int a = 0; a <= D; ++a)
    for (int b = a; a + b <= D; ++b)
      for (std::size_t i = 0; i < dim(a); ++i)
        for (std::size_t j = 0; j < dim(b); ++j) {
          const Element u = basis_element(a, i), v = basis_element(b, j);
          const Element uv = multiply(u, v);
          Element vu = multiply(v, u);
          if ((a * b) % 2) vu = scale(vu, p.neg(1));
          if (!(uv == vu) && rep.graded_commutative) {
            rep.graded_commutative = false;
            rep.witness = "commutativity fails on " + to_string(u) + ", " + to_string(v);
          }
          if (a + b < D) {
            const Element lhs = differential(uv);
            Element rhs = multiply(differential(u), v);
            Element t = multiply(u, differential(v));
            if (a % 2) t = scale(t, p.neg(1));
            rhs = add(rhs, t);
            if (!(lhs == rhs) && rep.leibniz) {
              rep.leibniz = false;
              rep.witness = "Leibniz fails on " + to_string(u) + ", " + to_string(v);
            }
          }
        }
  for (int a = 1; a <= D; ++a)
    for (int b = 1; a + b <= D; ++b)
      for (int c = 1; a + b + c <= D; ++c)
        for (std::size_t i = 0; i < dim(a); ++i)
          for (std::size_t j = 0; j < dim(b); ++j) {
            const Element uv = multiply(basis_element(a, i), basis_element(b, j));
            for (std::size_t k = 0; k < dim(c); ++k) {
              const Element w = basis_element(c, k);
              const Element vw = multiply(basis_element(b, j), w);
              if (!(multiply(uv, w) == multiply(basis_element(a, i), vw)) && rep.associative) {
                rep.associative = false;
                rep.witness = "associativity fails in degrees " + std::to_string(a) + "," +
                              std::to_string(b) + "," + std::to_string(c);
              }
            }
          }
  return rep;
}

// ---------------------------------------------------------------------------
// Cohomology

CohomologyRing::CohomologyRing(AlgebraPtr alg) : alg_(std::move(alg)) {
  const Prime p = alg_->prime();
  for (int n = 0; n < alg_->cap(); ++n) {
    Subspace z = kernel(alg_->d_matrix(n));
    Subspace b = n == 0 ? Subspace(p, alg_->dim(0)) : image(alg_->d_matrix(n - 1));
    z_.push_back(z);
    b_.push_back(b);
    h_.emplace_back(std::move(b), std::move(z));
  }
}

std::size_t CohomologyRing::dim(int n) const { return in_range(n) ? h_[n].dim() : 0; }

const Subspace& CohomologyRing::cocycles(int n) const {
  if (!in_range(n)) throw Error(ErrorCode::DegreeOverflow, "cohomology degree out of range");
  return z_[n];
}

const Subspace& CohomologyRing::coboundaries(int n) const {
  if (!in_range(n)) throw Error(ErrorCode::DegreeOverflow, "cohomology degree out of range");
  return b_[n];
}

Element CohomologyRing::representative(int n, std::size_t i) const {
  if (!in_range(n)) throw Error(ErrorCode::DegreeOverflow, "cohomology degree out of range");
  return {n, h_[n].representatives().at(i)};
}

std::vector<Element> CohomologyRing::representatives(int n) const {
  std::vector<Element> out;
  for (std::size_t i = 0; i < dim(n); ++i) out.push_back(representative(n, i));
  return out;
}

bool CohomologyRing::is_cocycle(const Element& u) const { return cocycles(u.degree).contains(u.coords); }
bool CohomologyRing::is_coboundary(const Element& u) const { return coboundaries(u.degree).contains(u.coords); }

FpVector CohomologyRing::project(const Element& u) const {
  if (!is_cocycle(u)) throw Error(ErrorCode::NotACocycle, alg_->to_string(u) + " is not a cocycle");
  return h_[u.degree].project(u.coords);
}

Element CohomologyRing::lift(int n, const FpVector& coords) const {
  if (!in_range(n)) throw Error(ErrorCode::DegreeOverflow, "cohomology degree out of range");
  return {n, h_[n].lift(coords)};
}

FpVector CohomologyRing::multiply(int n, const FpVector& x, int m, const FpVector& y) const {
  return project(alg_->multiply(lift(n, x), lift(m, y)));
}

FpMatrix CohomologyRing::frobenius(int n) const {
  const int target = static_cast<int>(prime().value()) * n;
  if (!in_range(target)) throw Error(ErrorCode::DegreeOverflow, "Frobenius target degree out of range");
  std::vector<FpVector> cols;
  for (std::size_t i = 0; i < dim(n); ++i) cols.push_back(project(alg_->power_p(representative(n, i))));
  return FpMatrix::from_columns(prime(), dim(target), cols);
}

Subspace CohomologyRing::cochain_power_image(int n) const {
  const int target = static_cast<int>(prime().value()) * n;
  if (!in_range(target)) throw Error(ErrorCode::DegreeOverflow, "power target degree out of range");
  std::vector<FpVector> vecs;
  for (std::size_t i = 0; i < alg_->dim(n); ++i)
    vecs.push_back(project(alg_->power_p(alg_->basis_element(n, i))));
  return Subspace::span(prime(), dim(target), vecs);
}

std::string CohomologyRing::class_string(int n, const FpVector& coords) const {
  if (coords.is_zero()) return "0";
  return "[" + alg_->to_string(lift(n, coords)) + "]";
}

std::vector<int> CohomologyRing::dimensions() const {
  std::vector<int> out;
  for (int n = 0; n <= top(); ++n) out.push_back(static_cast<int>(dim(n)));
  return out;
}

// ---------------------------------------------------------------------------
// Morphisms

Morphism::Morphism(AlgebraPtr source, AlgebraPtr target, std::vector<Element> images, bool)
    : src_(std::move(source)), tgt_(std::move(target)), images_(std::move(images)) {
  check_same_prime(src_->prime(), tgt_->prime());
  if (images_.size() != src_->generator_count())
    throw Error(ErrorCode::NotAMorphism, "need one image per source generator");
  for (std::size_t g = 0; g < images_.size(); ++g)
    if (images_[g].degree != src_->monoid().degree(g))
      throw Error(ErrorCode::NotAMorphism, "image of '" + src_->presentation().generators[g].name +
                                               "' has the wrong degree");
}

Morphism::Morphism(AlgebraPtr source, AlgebraPtr target, std::vector<Element> images)
    : Morphism(std::move(source), std::move(target), std::move(images), true) {
  MorphismReport rep = check();
  if (!rep.ok) throw Error(ErrorCode::NotAMorphism, rep.witness);
}

Morphism Morphism::unchecked(AlgebraPtr source, AlgebraPtr target, std::vector<Element> images) {
  return Morphism(std::move(source), std::move(target), std::move(images), true);
}

Morphism Morphism::from_strings(AlgebraPtr source, AlgebraPtr target,
                                const std::map<std::string, std::string>& images) {
  std::vector<Element> imgs;
  for (const auto& g : source->presentation().generators) {
    auto it = images.find(g.name);
    imgs.push_back(it == images.end() ? target->zero(g.degree) : target->parse(it->second, g.degree));
  }
  for (const auto& [name, text] : images)
    if (!source->generator_index(name))
      throw Error(ErrorCode::NotAMorphism, "image given for unknown generator '" + name + "'");
  return Morphism(std::move(source), std::move(target), std::move(imgs));
}

Morphism Morphism::identity(AlgebraPtr alg) {
  std::vector<Element> imgs;
  for (std::size_t g = 0; g < alg->generator_count(); ++g) imgs.push_back(alg->generator(g));
  return Morphism(alg, alg, std::move(imgs));
}

Element Morphism::apply_monomial(const Exponents& e) const {
  Element out = tgt_->one();
  for (std::size_t g = 0; g < e.size(); ++g)
    for (unsigned k = 0; k < e[g]; ++k) out = tgt_->multiply(out, images_[g]);
  return out;
}

Element Morphism::apply(const Element& u) const {
  Element out = tgt_->zero(u.degree);
  for (std::size_t i = 0; i < u.coords.size(); ++i)
    if (u.coords[i]) out.coords.axpy(u.coords[i], apply_monomial(src_->basis_monomial(u.degree, i)).coords);
  return out;
}

MorphismReport Morphism::check() const {
  const int cap = std::min(src_->cap(), tgt_->cap());
  const Prime p = src_->prime();
  for (std::size_t r = 0; r < src_->relations_.size(); ++r) {
    const SparsePoly& rel = src_->relations_[r];
    if (rel.empty()) continue;
    const int deg = src_->monoid().degree(rel.begin()->first);
    if (deg > cap) continue;
    Element img = tgt_->zero(deg);
    for (const auto& [m, c] : rel) img.coords.axpy(c, apply_monomial(m).coords);
    if (!img.is_zero())
      return {false, "relation '" + src_->presentation().relations[r] + "' maps to " + tgt_->to_string(img)};
  }
  for (std::size_t g = 0; g < images_.size(); ++g) {
    const int deg = src_->monoid().degree(g);
    if (deg + 1 > cap) continue;
    Element lhs = tgt_->differential(images_[g]);
    Element rhs = tgt_->zero(deg + 1);
    if (src_->gen_differential_[g])
      for (const auto& [m, c] : *src_->gen_differential_[g]) rhs.coords.axpy(c, apply_monomial(m).coords);
    if (!(lhs == rhs))
      return {false, "d f(" + src_->presentation().generators[g].name + ") = " + tgt_->to_string(lhs) +
                         " but f(d " + src_->presentation().generators[g].name + ") = " + tgt_->to_string(rhs)};
  }
  (void)p;
  return {};
}

FpMatrix Morphism::matrix(int n) const {
  std::vector<FpVector> cols;
  for (std::size_t i = 0; i < src_->dim(n); ++i) cols.push_back(apply(src_->basis_element(n, i)).coords);
  return FpMatrix::from_columns(src_->prime(), tgt_->dim(n), cols);
}

bool Morphism::surjective(int n) const { return rank(matrix(n)) == tgt_->dim(n); }

MorphismReport check_morphism(const Morphism& f) { return f.check(); }

std::vector<FpMatrix> induced_map(const Morphism& f, const CohomologyRing& hs, const CohomologyRing& ht) {
  const int top = std::min(hs.top(), ht.top());
  std::vector<FpMatrix> out;
  for (int n = 0; n <= top; ++n) {
    std::vector<FpVector> cols;
    for (std::size_t i = 0; i < hs.dim(n); ++i) cols.push_back(ht.project(f.apply(hs.representative(n, i))));
    out.push_back(FpMatrix::from_columns(hs.prime(), ht.dim(n), cols));
  }
  return out;
}

bool is_iso(const FpMatrix& m) { return m.rows() == m.cols() && rank(m) == m.rows(); }

bool is_quasi_iso(const Morphism& f, const CohomologyRing& hs, const CohomologyRing& ht) {
  for (const auto& m : induced_map(f, hs, ht))
    if (!is_iso(m)) return false;
  return true;
}

bool is_quasi_iso(const Morphism& f) {
  return is_quasi_iso(f, CohomologyRing(f.source_ptr()), CohomologyRing(f.target_ptr()));
}

// ---------------------------------------------------------------------------

std::vector<std::vector<Exponents>> divided_power_basis(Prime p, int gen_degree, int cap) {
  if (gen_degree < 1) throw Error(ErrorCode::InvalidArgument, "generator degree must be >= 1");
  std::vector<std::vector<Exponents>> out(std::max(cap, 0) + 1);
  if (gen_degree % 2 != 0) {
    out[0].push_back(Exponents{0});
    if (gen_degree <= cap) out[gen_degree].push_back(Exponents{1});
    return out;
  }
  std::vector<int> weights;
  for (int w = gen_degree; w <= cap; w += gen_degree) weights.push_back(w);
  const int k = static_cast<int>(weights.size());
  Exponents cur(k, 0);
  std::function<void(int, int)> rec = [&](int i, int deg) {
    if (i == k) {
      out[deg].push_back(cur);
      return;
    }
    for (unsigned e = 0; e < p.value() && deg + static_cast<int>(e) * weights[i] <= cap; ++e) {
      cur[i] = static_cast<std::uint16_t>(e);
      rec(i + 1, deg + static_cast<int>(e) * weights[i]);
    }
    cur[i] = 0;
  };
  rec(0, 0);
  for (auto& v : out) std::sort(v.begin(), v.end(), std::greater<>());
  return out;
}

}  // namespace obstrukt
