#include "obstrukt/products.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace obstrukt {

namespace {

constexpr std::uint64_t kSaturated = UINT64_MAX;

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return a * b;
}

std::uint64_t size_of(const Subspace& s) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < s.dim(); ++i) n = sat_mul(n, s.prime().value());
  return n;
}

void for_each_in(const Subspace& s, const std::function<void(const FpVector&)>& f) {
  AffineSet(s.prime(), s.ambient(), FpVector(s.prime(), s.ambient()), s.basis()).for_each([&](const FpVector& v) {
    f(v);
    return true;
  });
}

void for_each_in(const AffineSet& s, const std::function<void(const FpVector&)>& f) {
  s.for_each([&](const FpVector& v) {
    f(v);
    return true;
  });
}

Element rep_of(const CohomologyRing& h, const HClass& x) { return h.lift(x.degree, x.coords); }

void check_class(const CohomologyRing& h, const HClass& x) {
  if (!h.in_range(x.degree)) throw Error(ErrorCode::DegreeOverflow, "class degree out of range");
  if (x.coords.size() != h.dim(x.degree) || !(x.coords.prime() == h.prime()))
    throw Error(ErrorCode::InvalidDimension, "class coordinates do not match H^" + std::to_string(x.degree));
}

void check_degree(const CohomologyRing& h, int n, const std::string& what) {
  if (!h.in_range(n))
    throw Error(ErrorCode::DegreeOverflow, what + " lands in degree " + std::to_string(n) +
                                               ", above the certified range (<= " + std::to_string(h.top()) + ")");
}

void require_zero_product(const CohomologyRing& h, const HClass& x, const HClass& y) {
  check_degree(h, x.degree + y.degree, "product");
  const FpVector xy = h.multiply(x.degree, x.coords, y.degree, y.coords);
  if (!xy.is_zero())
    throw Error(ErrorCode::ProductsNonzero, "product of classes in degrees " + std::to_string(x.degree) + " and " +
                                                std::to_string(y.degree) + " is " +
                                                h.class_string(x.degree + y.degree, xy));
}

Subspace zero_space(const CohomologyRing& h, int n) { return Subspace(h.prime(), h.dim(n)); }

/// span{ x * g : g in G }, where G is a subspace of H^n and x a class.
Subspace times(const CohomologyRing& h, const HClass& x, int n, const Subspace& g) {
  const int target = x.degree + n;
  std::vector<FpVector> out;
  for (const auto& v : g.basis()) out.push_back(h.multiply(x.degree, x.coords, n, v));
  return Subspace::span(h.prime(), h.dim(target), out);
}

Subspace full_group(const CohomologyRing& h, int n) { return Subspace::full(h.prime(), h.dim(n)); }

HClass frobenius_of(const CohomologyRing& h, const HClass& x) {
  const int target = static_cast<int>(h.prime().value()) * x.degree;
  check_degree(h, target, "Frobenius");
  return {target, h.project(h.algebra().power_p(rep_of(h, x)))};
}

Subspace frobenius_image(const CohomologyRing& h, int n) {
  const int target = static_cast<int>(h.prime().value()) * n;
  if (n < 0) return zero_space(h, target);
  std::vector<FpVector> cols;
  for (std::size_t i = 0; i < h.dim(n); ++i) cols.push_back(h.project(h.algebra().power_p(h.representative(n, i))));
  return Subspace::span(h.prime(), h.dim(target), cols);
}

ProductSet affine(int degree, FpVector rep, Subspace ind) {
  ProductSet s;
  s.degree = degree;
  s.mode = ProductMode::Affine;
  s.representative = std::move(rep);
  s.indeterminacy = std::move(ind);
  return s;
}

ProductSet enumerated(int degree, std::set<FpVector> classes) {
  ProductSet s;
  s.degree = degree;
  s.mode = ProductMode::Enumerated;
  s.elements.assign(classes.begin(), classes.end());
  return s;
}

ProductSet undefined(int degree, std::string witness) {
  ProductSet s;
  s.degree = degree;
  s.mode = ProductMode::Undefined;
  s.witness = std::move(witness);
  return s;
}

std::string set_string(const CohomologyRing& h, const ProductSet& s) {
  auto cls = s.classes();
  if (!cls) return "(too many classes to list)";
  std::string out = "{";
  for (std::size_t i = 0; i < cls->size(); ++i) out += (i ? ", " : "") + h.class_string(s.degree, (*cls)[i]);
  return out + "}";
}

}  // namespace

// ---------------------------------------------------------------------------

HClass class_of(const CohomologyRing& h, const Element& cocycle) { return {cocycle.degree, h.project(cocycle)}; }

HClass basis_class(const CohomologyRing& h, int n, std::size_t i) {
  return {n, FpVector::unit(h.prime(), h.dim(n), i)};
}

HClass parse_class(const CohomologyRing& h, const std::string& text) {
  return class_of(h, h.algebra().parse(text));
}

std::string_view to_string(ProductMode m) {
  switch (m) {
    case ProductMode::Affine: return "AFFINE";
    case ProductMode::Enumerated: return "ENUMERATED";
    case ProductMode::Undefined: return "UNDEFINED";
  }
  return "?";
}

bool ProductSet::contains(const FpVector& cls) const {
  switch (mode) {
    case ProductMode::Affine: return indeterminacy->contains(cls - *representative);
    case ProductMode::Enumerated: return std::binary_search(elements.begin(), elements.end(), cls);
    case ProductMode::Undefined: return false;
  }
  return false;
}

bool ProductSet::contains_zero() const {
  if (mode == ProductMode::Affine) return indeterminacy->contains(*representative);
  if (mode == ProductMode::Enumerated)
    return std::any_of(elements.begin(), elements.end(), [](const FpVector& v) { return v.is_zero(); });
  return false;
}

std::optional<std::vector<FpVector>> ProductSet::classes(std::uint64_t bound) const {
  if (mode == ProductMode::Enumerated) return elements;
  if (mode == ProductMode::Undefined) return std::vector<FpVector>{};
  if (size_of(*indeterminacy) > bound) return std::nullopt;
  std::vector<FpVector> out;
  for_each_in(*indeterminacy, [&](const FpVector& v) { out.push_back(*representative + v); });
  std::sort(out.begin(), out.end());
  return out;
}

bool same_set(const ProductSet& a, const ProductSet& b) {
  if (!a.defined() || !b.defined()) return a.defined() == b.defined();
  if (a.degree != b.degree) return false;
  if (a.mode == ProductMode::Affine && b.mode == ProductMode::Affine)
    return *a.indeterminacy == *b.indeterminacy && a.indeterminacy->contains(*a.representative - *b.representative);
  auto ca = a.classes(kSaturated), cb = b.classes(kSaturated);
  return ca && cb && *ca == *cb;
}

bool same_set_modulo(const ProductSet& a, const ProductSet& b, const Subspace& q) {
  if (!a.defined() || !b.defined()) return a.defined() == b.defined();
  if (a.degree != b.degree) return false;
  auto widen = [&](const ProductSet& s) -> std::pair<FpVector, Subspace> {
    if (s.mode == ProductMode::Affine) return {*s.representative, sum(*s.indeterminacy, q)};
    // an enumerated set modulo q: reduced classes; as an affine shape only if it is one
    return {s.elements.front(), q};
  };
  if (a.mode == ProductMode::Affine && b.mode == ProductMode::Affine) {
    auto [ra, ia] = widen(a);
    auto [rb, ib] = widen(b);
    return ia == ib && ia.contains(ra - rb);
  }
  auto reduced = [&](const ProductSet& s) {
    std::set<FpVector> out;
    if (s.mode == ProductMode::Affine) {
      Subspace ind = sum(*s.indeterminacy, q);
      // enumerate a complement of q inside ind
      std::vector<FpVector> extra;
      for (const auto& v : ind.basis()) {
        std::vector<FpVector> probe = q.basis();
        probe.insert(probe.end(), extra.begin(), extra.end());
        probe.push_back(v);
        if (Subspace::span(q.prime(), q.ambient(), probe).dim() > q.dim() + extra.size()) extra.push_back(v);
      }
      Subspace ext = Subspace::span(q.prime(), q.ambient(), extra);
      for_each_in(ext, [&](const FpVector& v) { out.insert(q.reduce(*s.representative + v)); });
    } else {
      for (const auto& e : s.elements) out.insert(q.reduce(e));
    }
    return out;
  };
  return reduced(a) == reduced(b);
}

ProductSet transport(const ProductSet& s, const FpMatrix& map) {
  ProductSet out = s;
  auto image_of = [&](const Subspace& sub) {
    std::vector<FpVector> v;
    for (const auto& b : sub.basis()) v.push_back(map.apply(b));
    return Subspace::span(map.prime(), map.rows(), v);
  };
  if (s.representative) out.representative = map.apply(*s.representative);
  if (s.indeterminacy) out.indeterminacy = image_of(*s.indeterminacy);
  if (s.stated_indeterminacy) out.stated_indeterminacy = image_of(*s.stated_indeterminacy);
  std::set<FpVector> el;
  for (const auto& e : s.elements) el.insert(map.apply(e));
  out.elements.assign(el.begin(), el.end());
  return out;
}

// ---------------------------------------------------------------------------

ProductSet massey_triple(const CohomologyRing& h, const HClass& x, const HClass& y, const HClass& z,
                         const ProductOptions&) {
  for (const auto* c : {&x, &y, &z}) check_class(h, *c);
  const int deg = x.degree + y.degree + z.degree - 1;
  check_degree(h, deg, "Massey product");
  require_zero_product(h, x, y);
  require_zero_product(h, y, z);
  const DgAlgebra& alg = h.algebra();
  const Prime p = h.prime();
  const Element a = rep_of(h, x), b = rep_of(h, y), e = rep_of(h, z);
  const Element ab = alg.multiply(a, b), be = alg.multiply(b, e);
  const Element u{ab.degree - 1, alg.find_primitive(ab).point()};
  const Element v{be.degree - 1, alg.find_primitive(be).point()};
  Element av = alg.multiply(a, v);
  if (x.degree % 2 == 0) av = alg.scale(av, p.neg(1));
  const Element value = alg.add(alg.multiply(u, e), av);
  Subspace ind = sum(times(h, x, y.degree + z.degree - 1, full_group(h, y.degree + z.degree - 1)),
                     [&] {
                       // H^{|x|+|y|-1} * z
                       const int n = x.degree + y.degree - 1;
                       std::vector<FpVector> out;
                       for (std::size_t i = 0; i < h.dim(n); ++i)
                         out.push_back(h.multiply(n, FpVector::unit(p, h.dim(n), i), z.degree, z.coords));
                       return Subspace::span(p, h.dim(deg), out);
                     }());
  return affine(deg, h.project(value), std::move(ind));
}

Subspace indeterminacy_type1(const CohomologyRing& h, const HClass& x, const HClass& y, IndeterminacyKind kind) {
  check_class(h, x);
  check_class(h, y);
  const int p = static_cast<int>(h.prime().value());
  const int m = x.degree + y.degree - 1;
  const int deg = p * m;
  check_degree(h, deg, "type 1 Frobenius product");
  Subspace ind = frobenius_image(h, m);
  auto add_term = [&](const HClass& u, int other_degree) {
    const int k = other_degree - 1;
    if (k < 0) return;
    const HClass fu = frobenius_of(h, u);
    if (fu.coords.is_zero()) return;
    const Subspace g = kind == IndeterminacyKind::Exact ? h.cochain_power_image(k) : full_group(h, p * k);
    ind = sum(ind, times(h, fu, p * k, g));
  };
  add_term(x, y.degree);
  add_term(y, x.degree);
  return ind;
}

ProductSet frobenius_type1(const CohomologyRing& h, const HClass& x, const HClass& y, const ProductOptions&) {
  check_class(h, x);
  check_class(h, y);
  const Prime p = h.prime();
  const int m = x.degree + y.degree - 1;
  const int deg = static_cast<int>(p.value()) * m;
  check_degree(h, deg, "type 1 Frobenius product");
  require_zero_product(h, x, y);
  if (!p.is_two() && m % 2 != 0) {
    ProductSet s = affine(deg, FpVector(p, h.dim(deg)), zero_space(h, deg));
    s.stated_indeterminacy = zero_space(h, deg);
    s.witness = "odd-degree lift: c^p = 0 identically";
    return s;
  }
  const DgAlgebra& alg = h.algebra();
  const Element ab = alg.multiply(rep_of(h, x), rep_of(h, y));
  const Element c{m, alg.find_primitive(ab).point()};
  ProductSet s = affine(deg, h.project(alg.power_p(c)), indeterminacy_type1(h, x, y, IndeterminacyKind::Exact));
  s.stated_indeterminacy = indeterminacy_type1(h, x, y, IndeterminacyKind::Stated);
  return s;
}

// ---------------------------------------------------------------------------

ProductSet frobenius_type2(const CohomologyRing& h, const HClass& x, const HClass& y, const ProductOptions& opts) {
  check_class(h, x);
  check_class(h, y);
  const Prime p = h.prime();
  if (p.is_two()) throw Error(ErrorCode::OddPrimeRequired, "type 2 Frobenius products need an odd prime");
  const int m = x.degree + y.degree - 1;
  const int deg = static_cast<int>(p.value() - 1) * m + x.degree + y.degree;
  check_degree(h, deg, "type 2 Frobenius product");
  require_zero_product(h, x, y);
  const DgAlgebra& alg = h.algebra();
  const Element ab = alg.multiply(rep_of(h, x), rep_of(h, y));
  const AffineSet lifts = alg.find_primitive(ab);
  auto value = [&](const FpVector& c) {
    return h.project(alg.multiply(alg.power(Element{m, c}, p.value() - 1), ab));
  };

  // quoted indeterminacy: span of [h]^{p-1} x y over h in H^m
  std::vector<FpVector> stated;
  const FpVector xy = h.multiply(x.degree, x.coords, y.degree, y.coords);
  for (std::size_t i = 0; i < h.dim(m); ++i) {
    const Element r = alg.power(h.representative(m, i), p.value() - 1);
    stated.push_back(h.multiply(r.degree, h.project(r), x.degree + y.degree, xy));
  }
  Subspace stated_ind = Subspace::span(p, h.dim(deg), stated);

  const auto count = lifts.cardinality(opts.enumeration_bound);
  if (!count) {
    ProductSet s = affine(deg, value(lifts.point()), stated_ind);
    s.stated_indeterminacy = stated_ind;
    s.partial = true;
    s.witness = "lift coset exceeds the enumeration bound; representative plus quoted indeterminacy";
    return s;
  }
  std::set<FpVector> classes;
  for_each_in(lifts, [&](const FpVector& c) { classes.insert(value(c)); });
  ProductSet s = enumerated(deg, std::move(classes));
  s.stated_indeterminacy = stated_ind;
  return s;
}

// ---------------------------------------------------------------------------
// Higher order type 1. For fixed representatives a, b the defining systems
// form an affine family: c_1 ranges over c + Z, and c -> c^p is additive on
// the cochains involved, so each constraint [c_i^p] = 0 cuts an affine
// subfamily and each next lift is affine in the remaining parameters.

namespace {

struct Family {
  Element base;
  std::vector<Element> dirs;
};

struct FamilyResult {
  std::optional<ProductSet> set;  // affine set of values
  int failed_stage = 0;           // order whose set contains no coboundary
};

FamilyResult higher_for_reps(const CohomologyRing& h, const Element& a, const Element& b, int order) {
  const DgAlgebra& alg = h.algebra();
  const Prime p = h.prime();
  const Element ab = alg.multiply(a, b);
  const int m1 = ab.degree - 1;
  Family fam{Element{m1, alg.find_primitive(ab).point()}, {}};
  for (const auto& z : h.cocycles(m1).basis()) fam.dirs.push_back(Element{m1, z});

  for (int stage = 2; stage < order; ++stage) {
    // fam describes c_{stage-1}; require [c^p] = 0 and lift to c_stage.
    const Element base_p = alg.power_p(fam.base);
    const int n = base_p.degree;
    std::vector<Element> dir_p;
    std::vector<FpVector> cols;
    for (const auto& d : fam.dirs) {
      dir_p.push_back(alg.power_p(d));
      cols.push_back(h.project(dir_p.back()));
    }
    const FpMatrix m = FpMatrix::from_columns(p, h.dim(n), cols);
    const AffineSet ts = solve_affine(m, -h.project(base_p));
    if (ts.is_empty()) return {std::nullopt, stage};
    Element w = base_p;
    for (std::size_t k = 0; k < dir_p.size(); ++k)
      if (ts.point()[k]) w = alg.add(w, alg.scale(dir_p[k], ts.point()[k]));
    Family next{Element{n - 1, alg.find_primitive(w).point()}, {}};
    for (const auto& t : ts.directions()) {
      Element u = alg.zero(n);
      for (std::size_t k = 0; k < dir_p.size(); ++k)
        if (t[k]) u = alg.add(u, alg.scale(dir_p[k], t[k]));
      next.dirs.push_back(Element{n - 1, alg.find_primitive(u).point()});
    }
    for (const auto& z : h.cocycles(n - 1).basis()) next.dirs.push_back(Element{n - 1, z});
    fam = std::move(next);
  }
  const Element vp = alg.power_p(fam.base);
  std::vector<FpVector> dirs;
  for (const auto& d : fam.dirs) dirs.push_back(h.project(alg.power_p(d)));
  return {affine(vp.degree, h.project(vp), Subspace::span(p, h.dim(vp.degree), dirs)), 0};
}

int higher_degree(const CohomologyRing& h, const HClass& x, const HClass& y, int order) {
  const int p = static_cast<int>(h.prime().value());
  int m = x.degree + y.degree - 1;
  for (int i = 2; i < order; ++i) m = p * m - 1;
  return p * m;
}

}  // namespace

ProductSet higher_frobenius_type1(const CohomologyRing& h, const HClass& x, const HClass& y, int order,
                                  const ProductOptions& opts) {
  if (order < 2) throw Error(ErrorCode::InvalidArgument, "order must be >= 2");
  if (order == 2) return frobenius_type1(h, x, y, opts);
  check_class(h, x);
  check_class(h, y);
  const int deg = higher_degree(h, x, y, order);
  check_degree(h, deg, "order " + std::to_string(order) + " type 1 product");
  require_zero_product(h, x, y);
  const Subspace bx = h.coboundaries(x.degree), by = h.coboundaries(y.degree);
  const Element a0 = rep_of(h, x), b0 = rep_of(h, y);
  const DgAlgebra& alg = h.algebra();

  std::vector<ProductSet> sets;
  int failed_stage = order;
  bool partial = false;
  auto run = [&](const Element& a, const Element& b) {
    FamilyResult r = higher_for_reps(h, a, b, order);
    if (r.set) sets.push_back(std::move(*r.set));
    else failed_stage = std::min(failed_stage, r.failed_stage);
  };
  if (sat_mul(size_of(bx), size_of(by)) <= opts.enumeration_bound) {
    for_each_in(bx, [&](const FpVector& da) {
      const Element a = alg.add(a0, Element{x.degree, da});
      for_each_in(by, [&](const FpVector& db) { run(a, alg.add(b0, Element{y.degree, db})); });
    });
  } else {
    run(a0, b0);
    partial = true;
  }

  if (sets.empty()) {
    const ProductSet prev = higher_frobenius_type1(h, x, y, order - 1, opts);
    ProductSet s = undefined(deg, "order " + std::to_string(order - 1) + " set " + set_string(h, prev) +
                                      " contains no coboundary");
    s.partial = partial;
    return s;
  }
  ProductSet out = sets.front();
  const bool uniform = std::all_of(sets.begin(), sets.end(), [&](const ProductSet& s) { return same_set(s, out); });
  if (!uniform) {
    std::set<FpVector> classes;
    for (const auto& s : sets) {
      auto cls = s.classes(opts.enumeration_bound);
      if (!cls) throw Error(ErrorCode::TooLarge, "higher product set too large to enumerate");
      classes.insert(cls->begin(), cls->end());
    }
    out = enumerated(deg, std::move(classes));
  }
  out.partial = partial;
  if (partial) out.witness = "representative variations exceed the enumeration bound; canonical representatives only";
  return out;
}

ProductSet type1_for_cocycles(const CohomologyRing& h, const Element& a, const Element& b, int order) {
  if (order < 2) throw Error(ErrorCode::InvalidArgument, "order must be >= 2");
  if (!h.is_cocycle(a) || !h.is_cocycle(b)) throw Error(ErrorCode::NotACocycle, "representatives must be cocycles");
  const HClass x = class_of(h, a), y = class_of(h, b);
  const int deg = higher_degree(h, x, y, order);
  check_degree(h, deg, "type 1 product");
  require_zero_product(h, x, y);
  FamilyResult r = higher_for_reps(h, a, b, order);
  if (r.set) return std::move(*r.set);
  return undefined(deg, "order " + std::to_string(r.failed_stage) + " values for these representatives contain no coboundary");
}

StrictReport strictly_defined(const CohomologyRing& h, const HClass& x, const HClass& y, int order,
                              const ProductOptions& opts) {
  StrictReport rep;
  if (order < 2) throw Error(ErrorCode::InvalidArgument, "order must be >= 2");
  const int p = static_cast<int>(h.prime().value());
  if (!h.multiply(x.degree, x.coords, y.degree, y.coords).is_zero()) {
    rep.witness = "product xy is nonzero";
    return rep;
  }
  // H^{p^k |u| - (p + ... + p^k)} = 0 for k = 1 .. order-1 and u = x, y
  long pk = 1, tail = 0;
  for (int k = 1; k < order; ++k) {
    pk *= p;
    tail += pk;
    for (int d : {x.degree, y.degree}) {
      const long n = pk * d - tail;
      if (n >= 0 && n <= h.top() && h.dim(static_cast<int>(n)) != 0) rep.failing_degrees.push_back(static_cast<int>(n));
      if (n > h.top()) rep.failing_degrees.push_back(static_cast<int>(n));
    }
  }
  std::sort(rep.failing_degrees.begin(), rep.failing_degrees.end());
  rep.failing_degrees.erase(std::unique(rep.failing_degrees.begin(), rep.failing_degrees.end()),
                            rep.failing_degrees.end());
  if (order > 2) {
    const ProductSet prev = higher_frobenius_type1(h, x, y, order - 1, opts);
    if (!prev.contains_zero()) {
      rep.witness = "order " + std::to_string(order - 1) + " set " + set_string(h, prev) + " does not contain 0";
      return rep;
    }
  }
  if (!rep.failing_degrees.empty()) {
    std::ostringstream os;
    os << "nonvanishing (or uncertified) cohomology in degrees";
    for (int d : rep.failing_degrees) os << ' ' << d;
    rep.witness = os.str();
    return rep;
  }
  rep.strict = true;
  // F(H^{m_{n-1}}) + x^{p^{n-1}} H^{..} + y^{p^{n-1}} H^{..}; the latter groups vanish here.
  int m = x.degree + y.degree - 1;
  for (int i = 2; i < order; ++i) m = p * m - 1;
  check_degree(h, p * m, "order " + std::to_string(order) + " type 1 product");
  rep.indeterminacy = frobenius_image(h, m);
  return rep;
}

// ---------------------------------------------------------------------------

ProductSet compute_product(const CohomologyRing& h, const ProductQuery& q, const ProductOptions& opts) {
  auto need = [&](std::size_t n) {
    if (q.classes.size() != n)
      throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(n) + " classes");
  };
  switch (q.kind) {
    case ProductKind::Massey: need(3); return massey_triple(h, q.classes[0], q.classes[1], q.classes[2], opts);
    case ProductKind::FrobeniusType1: need(2); return frobenius_type1(h, q.classes[0], q.classes[1], opts);
    case ProductKind::FrobeniusType2: need(2); return frobenius_type2(h, q.classes[0], q.classes[1], opts);
    case ProductKind::HigherType1:
      need(2);
      return higher_frobenius_type1(h, q.classes[0], q.classes[1], q.order, opts);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown product kind");
}

// ---------------------------------------------------------------------------

ProductSet bruteforce_oracle(const CohomologyRing& h, const ProductQuery& q, const ProductOptions& opts) {
  const DgAlgebra& alg = h.algebra();
  const Prime p = h.prime();
  for (const auto& c : q.classes) check_class(h, c);
  auto reps = [&](const HClass& x) {
    std::vector<Element> out;
    const Element a0 = rep_of(h, x);
    if (size_of(h.coboundaries(x.degree)) > opts.enumeration_bound)
      throw Error(ErrorCode::TooLarge, "too many representatives to enumerate");
    for_each_in(h.coboundaries(x.degree), [&](const FpVector& v) { out.push_back(alg.add(a0, Element{x.degree, v})); });
    return out;
  };
  auto lifts_bound = [&](int n) { return size_of(h.cocycles(n)); };
  auto check_bound = [&](std::uint64_t n) {
    if (n > opts.enumeration_bound)
      throw Error(ErrorCode::TooLarge, "defining systems exceed the enumeration bound");
  };
  std::set<FpVector> classes;

  if (q.kind == ProductKind::Massey) {
    if (q.classes.size() != 3) throw Error(ErrorCode::InvalidArgument, "Massey product needs three classes");
    const HClass &x = q.classes[0], &y = q.classes[1], &z = q.classes[2];
    const int deg = x.degree + y.degree + z.degree - 1;
    check_degree(h, deg, "Massey product");
    require_zero_product(h, x, y);
    require_zero_product(h, y, z);
    std::uint64_t total = 1;
    for (const auto* c : {&x, &y, &z}) total = sat_mul(total, size_of(h.coboundaries(c->degree)));
    total = sat_mul(total, lifts_bound(x.degree + y.degree - 1));
    total = sat_mul(total, lifts_bound(y.degree + z.degree - 1));
    check_bound(total);
    for (const auto& a : reps(x))
      for (const auto& b : reps(y))
        for (const auto& e : reps(z)) {
          const Element ab = alg.multiply(a, b), be = alg.multiply(b, e);
          for_each_in(alg.find_primitive(ab), [&](const FpVector& uc) {
            for_each_in(alg.find_primitive(be), [&](const FpVector& vc) {
              const Element u{ab.degree - 1, uc}, v{be.degree - 1, vc};
              Element av = alg.multiply(a, v);
              if (x.degree % 2 == 0) av = alg.scale(av, p.neg(1));
              classes.insert(h.project(alg.add(alg.multiply(u, e), av)));
            });
          });
        }
    return enumerated(deg, std::move(classes));
  }

  if (q.classes.size() != 2) throw Error(ErrorCode::InvalidArgument, "Frobenius products need two classes");
  const HClass &x = q.classes[0], &y = q.classes[1];
  require_zero_product(h, x, y);
  const int m = x.degree + y.degree - 1;
  std::uint64_t total = sat_mul(size_of(h.coboundaries(x.degree)), size_of(h.coboundaries(y.degree)));

  if (q.kind == ProductKind::FrobeniusType2) {
    if (p.is_two()) throw Error(ErrorCode::OddPrimeRequired, "type 2 Frobenius products need an odd prime");
    const int deg = static_cast<int>(p.value() - 1) * m + x.degree + y.degree;
    check_degree(h, deg, "type 2 Frobenius product");
    check_bound(sat_mul(total, lifts_bound(m)));
    for (const auto& a : reps(x))
      for (const auto& b : reps(y)) {
        const Element ab = alg.multiply(a, b);
        for_each_in(alg.find_primitive(ab), [&](const FpVector& c) {
          Element v = alg.one();
          for (unsigned i = 0; i + 1 < p.value(); ++i) v = alg.multiply(v, Element{m, c});
          classes.insert(h.project(alg.multiply(v, ab)));
        });
      }
    return enumerated(deg, std::move(classes));
  }

  const int order = q.kind == ProductKind::FrobeniusType1 ? 2 : q.order;
  if (order < 2) throw Error(ErrorCode::InvalidArgument, "order must be >= 2");
  const int deg = higher_degree(h, x, y, order);
  check_degree(h, deg, "type 1 product");
  {
    int mi = m;
    for (int i = 1; i < order; ++i) {
      total = sat_mul(total, lifts_bound(mi));
      mi = static_cast<int>(p.value()) * mi - 1;
    }
    check_bound(total);
  }
  // Literal recursion over c_1, ..., c_{order-1}.
  std::function<void(const Element&, int)> descend = [&](const Element& c, int stage) {
    const Element cp = alg.power_p(c);
    if (stage == order - 1) {
      classes.insert(h.project(cp));
      return;
    }
    for_each_in(alg.find_primitive(cp), [&](const FpVector& next) { descend(Element{cp.degree - 1, next}, stage + 1); });
  };
  for (const auto& a : reps(x))
    for (const auto& b : reps(y)) {
      const Element ab = alg.multiply(a, b);
      for_each_in(alg.find_primitive(ab), [&](const FpVector& c) { descend(Element{m, c}, 1); });
    }
  if (classes.empty()) return undefined(deg, "no complete defining system exists");
  return enumerated(deg, std::move(classes));
}

// ---------------------------------------------------------------------------

std::string render(const CohomologyRing& h, const ProductSet& s) {
  std::ostringstream os;
  os << to_string(s.mode) << " in degree " << s.degree;
  if (s.mode == ProductMode::Affine) {
    os << ": " << h.class_string(s.degree, *s.representative) << " + span{";
    for (std::size_t i = 0; i < s.indeterminacy->dim(); ++i)
      os << (i ? ", " : "") << h.class_string(s.degree, s.indeterminacy->basis()[i]);
    os << "}";
    if (auto cls = s.classes(64)) os << " = " << set_string(h, s);
  } else if (s.mode == ProductMode::Enumerated) {
    os << ": " << set_string(h, s);
  }
  if (s.partial) os << " (partial)";
  if (!s.witness.empty()) os << "; " << s.witness;
  return os.str();
}

}  // namespace obstrukt
