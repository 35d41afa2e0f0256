#include "obstrukt/sullivan.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "obstrukt/json_io.hpp"

namespace obstrukt {

namespace {

std::string gen_name(int stage, std::size_t k) { return "v" + std::to_string(stage) + "_" + std::to_string(k + 1); }

// Number of monomials of the free graded-commutative algebra per degree.
std::vector<std::uint64_t> free_dims(const std::vector<int>& degrees, Prime p, int cap) {
  std::vector<std::uint64_t> dims(cap + 1, 0);
  dims[0] = 1;
  for (int deg : degrees) {
    const bool exterior = !p.is_two() && deg % 2 == 1;
    for (int n = cap; n >= deg; --n)
      for (int k = 1; k * deg <= n && (!exterior || k == 1); ++k) dims[n] += dims[n - k * deg];
  }
  return dims;
}

constexpr std::uint64_t kMaxModelDim = 20000;

void build(SullivanModel& m) {
  std::vector<int> degrees;
  for (const auto& g : m.generators) degrees.push_back(g.degree);
  const std::vector<std::uint64_t> dims = free_dims(degrees, m.base->prime(), m.cap);
  for (int n = 0; n <= m.cap; ++n)
    if (dims[n] > kMaxModelDim)
      throw Error(ErrorCode::TooLarge, "the quasi-free algebra has " + std::to_string(dims[n]) +
                                           " monomials in degree " + std::to_string(n) + "; lower the cap or the stages");
  Presentation pres;
  pres.prime = m.base->prime().value();
  pres.degree_cap = m.cap;
  for (const auto& g : m.generators) {
    pres.generators.push_back({g.name, g.degree});
    if (g.stage > 0) pres.differential[g.name] = g.d;
  }
  m.algebra = DgAlgebra::compile(pres);
  std::vector<Element> images;
  for (const auto& g : m.generators) images.push_back(g.image);
  m.structure_map = Morphism::unchecked(m.algebra, m.base, std::move(images));
  const MorphismReport rep = m.structure_map->check();
  if (!rep.ok) throw Error(ErrorCode::NotAMorphism, "structure map: " + rep.witness);
}

std::vector<FpMatrix> stage_stats(SullivanModel& m, SullivanStage& st, const CohomologyRing& hm,
                                  const CohomologyRing& ha) {
  std::vector<FpMatrix> hmap = induced_map(m.map(), hm, ha);
  st.surjective = true;
  st.kernel_dims.clear();
  for (int n = 0; n < m.cap; ++n) {
    const std::size_t r = rank(hmap[n]);
    st.kernel_dims.push_back(hm.dim(n) - r);
    if (r != ha.dim(n)) st.surjective = false;
  }
  return hmap;
}

// Total complex helpers for the column filtration.
std::vector<std::size_t> filtration_coords(const Bicomplex& b, int n, int q) {
  std::vector<std::size_t> out;
  for (int i = std::max(q, 0); i < b.columns(); ++i) {
    const int j = n - i;
    if (j < 0 || j >= b.rows()) continue;
    const std::size_t off = b.block_offset(n, i);
    for (std::size_t k = 0; k < b.dim(i, j); ++k) out.push_back(off + k);
  }
  return out;
}

// {x in F^q T^n : Dx in F^{q+s} T^{n+1}}
Subspace cycles(const Bicomplex& b, int s, int q, int n) {
  const Prime p = b.prime();
  const std::size_t dim = b.total_dim(n);
  if (n < 0) return Subspace(p, 0);
  const std::vector<std::size_t> src = filtration_coords(b, n, q);
  const FpMatrix dm = b.total_differential(n);
  const std::vector<std::size_t> keep = filtration_coords(b, n + 1, q + s);
  std::vector<bool> high(dm.rows(), false);
  for (auto k : keep) high[k] = true;
  std::vector<std::size_t> low_rows;
  for (std::size_t r = 0; r < dm.rows(); ++r)
    if (!high[r]) low_rows.push_back(r);
  FpMatrix m(p, low_rows.size(), src.size());
  for (std::size_t r = 0; r < low_rows.size(); ++r)
    for (std::size_t c = 0; c < src.size(); ++c) m(r, c) = dm(low_rows[r], src[c]);
  std::vector<FpVector> vecs;
  for (const auto& k : kernel_basis(m)) {
    FpVector v(p, dim);
    for (std::size_t c = 0; c < src.size(); ++c) v[src[c]] = k[c];
    vecs.push_back(std::move(v));
  }
  return Subspace::span(p, dim, vecs);
}

// Z_{r-1}^{q+1} + D Z_{r-1}^{q-r+1}, the denominator of E_r^q.
Subspace page_boundaries(const Bicomplex& b, int r, int q, int n) {
  const Prime p = b.prime();
  const Subspace z = cycles(b, r - 1, q + 1, n);
  std::vector<FpVector> vecs(z.basis().begin(), z.basis().end());
  if (n >= 1) {
    const FpMatrix dm = b.total_differential(n - 1);
    const Subspace lower = cycles(b, r - 1, q - r + 1, n - 1);
    for (const auto& x : lower.basis()) vecs.push_back(dm.apply(x));
  }
  return Subspace::span(p, b.total_dim(n), vecs);
}

}  // namespace

// ---------------------------------------------------------------------------
// Sullivan models

bool SullivanModel::quasi_iso() const {
  if (stages.empty()) return false;
  const auto& st = stages.back();
  return st.surjective && std::all_of(st.kernel_dims.begin(), st.kernel_dims.end(), [](auto k) { return k == 0; });
}

bool SullivanModel::in_higher_ideal(const Element& u) const {
  for (std::size_t i = 0; i < u.coords.size(); ++i) {
    if (!u.coords[i]) continue;
    const Exponents& e = algebra->basis_monomial(u.degree, i);
    bool hit = false;
    for (std::size_t g = 0; g < e.size() && !hit; ++g) hit = e[g] && generators[g].stage > 0;
    if (!hit) return false;
  }
  return true;
}

SullivanModel sullivan_step(const AlgebraPtr& base, int steps, std::optional<int> cap) {
  const int D = cap.value_or(base->cap());
  if (D > base->cap())
    throw Error(ErrorCode::CapExceeded,
                "model cap " + std::to_string(D) + " exceeds the base cap " + std::to_string(base->cap()));
  if (D < 1) throw Error(ErrorCode::InvalidArgument, "model cap must be at least 1");
  if (steps < 0) throw Error(ErrorCode::InvalidArgument, "negative number of stages");
  SullivanModel m;
  m.base = base;
  m.cap = D;
  const CohomologyRing ha(base);
  if (ha.dim(0) != 1) throw Error(ErrorCode::InvalidArgument, "the base algebra must have H^0 = F_p");

  SullivanStage st0;
  for (int n = 1; n < D; ++n)
    for (std::size_t i = 0; i < ha.dim(n); ++i) {
      st0.generators.push_back(m.generators.size());
      m.generators.push_back({gen_name(0, st0.generators.size() - 1), n, 0, "0", ha.representative(n, i)});
    }
  build(m);
  auto hm = std::make_unique<CohomologyRing>(m.algebra);
  std::vector<FpMatrix> hmap = stage_stats(m, st0, *hm, ha);
  m.stages.push_back(std::move(st0));

  for (int j = 1; j <= steps; ++j) {
    SullivanStage st;
    for (int n = 1; n < D; ++n) {
      for (const auto& k : kernel_basis(hmap[n])) {
        if (n == 1) throw Error(ErrorCode::InvalidArgument, "kernel in H^1 would need a generator of degree 0");
        const Element z = hm->lift(n, k);
        const AffineSet prim = base->find_primitive(m.map().apply(z));
        if (prim.is_empty()) throw Error(ErrorCode::NotACocycle, "kernel class has no primitive in the base");
        st.generators.push_back(m.generators.size());
        m.generators.push_back({gen_name(j, st.generators.size() - 1), n - 1, j, m.algebra->to_string(z),
                                Element{n - 1, prim.point()}});
      }
    }
    if (!st.generators.empty()) {
      build(m);
      hm = std::make_unique<CohomologyRing>(m.algebra);
      hmap = stage_stats(m, st, *hm, ha);
    } else {
      st.kernel_dims = m.stages.back().kernel_dims;
      st.surjective = m.stages.back().surjective;
    }
    m.stages.push_back(std::move(st));
  }
  return m;
}

Morphism lift(const SullivanModel& model, const Morphism& p, const Morphism& g) {
  if (g.source_ptr() != model.algebra) throw Error(ErrorCode::InvalidArgument, "g must start at the model");
  if (g.target_ptr() != p.target_ptr()) throw Error(ErrorCode::InvalidArgument, "g and p must share a target");
  const DgAlgebra& C = p.source();
  const DgAlgebra& T = p.target();
  const int D = model.cap;
  if (C.cap() < D || T.cap() < D)
    throw Error(ErrorCode::CapExceeded, "the lifting problem needs caps of at least " + std::to_string(D));
  for (int n = 0; n < D; ++n)
    if (!p.surjective(n)) throw Error(ErrorCode::NotSurjective, "p is not surjective in degree " + std::to_string(n));
  const CohomologyRing hc(p.source_ptr()), ht(p.target_ptr());
  const std::vector<FpMatrix> hp = induced_map(p, hc, ht);
  for (int n = 0; n < D; ++n)
    if (!is_iso(hp[n])) throw Error(ErrorCode::NotQuasiIso, "H(p) is not an isomorphism in degree " + std::to_string(n));

  const DgAlgebra& M = *model.algebra;
  std::vector<Element> images;
  for (std::size_t i = 0; i < M.generator_count(); ++i) images.push_back(C.zero(M.monoid().degree(i)));
  for (std::size_t i = 0; i < M.generator_count(); ++i) {
    const int deg = M.monoid().degree(i);
    const std::string& name = model.generators[i].name;
    const Morphism partial = Morphism::unchecked(model.algebra, p.source_ptr(), images);
    const Element hz = partial.apply(M.differential(M.generator(i)));
    const AffineSet prim = C.find_primitive(hz);
    if (prim.is_empty()) throw Error(ErrorCode::NotQuasiIso, "h(d" + name + ") is not exact in the source of p");
    Element c{deg, prim.point()};
    // defect in the target, a cocycle
    const Element e = T.add(g.images()[i], T.scale(p.apply(c), T.prime().neg(1)));
    const AffineSet w = solve_affine(hp[deg], ht.project(e));
    if (w.is_empty()) throw Error(ErrorCode::NotQuasiIso, "H(p) misses the defect of " + name);
    const Element wc = hc.lift(deg, w.point());
    c = C.add(c, wc);
    const Element r = T.add(e, T.scale(p.apply(wc), T.prime().neg(1)));
    if (!r.is_zero()) {
      const AffineSet u = T.find_primitive(r);
      if (u.is_empty()) throw Error(ErrorCode::NotQuasiIso, "defect of " + name + " is not exact");
      const AffineSet pre = solve_affine(p.matrix(deg - 1), u.point());
      if (pre.is_empty()) throw Error(ErrorCode::NotSurjective, "no preimage for the correction of " + name);
      c = C.add(c, C.differential(Element{deg - 1, pre.point()}));
    }
    images[i] = c;
  }
  Morphism h = Morphism::unchecked(model.algebra, p.source_ptr(), images);
  const MorphismReport rep = h.check();
  if (!rep.ok) throw Error(ErrorCode::NotAMorphism, "lift: " + rep.witness);
  for (std::size_t i = 0; i < images.size(); ++i)
    if (!(p.apply(images[i]) == g.images()[i]))
      throw Error(ErrorCode::NotAMorphism, "lift: p(h(" + model.generators[i].name + ")) != g(" +
                                               model.generators[i].name + ")");
  return h;
}

// ---------------------------------------------------------------------------
// Surjectivization

Surjectivization surjectivize(const Morphism& f, std::optional<int> cap) {
  const DgAlgebra& B = f.source();
  const DgAlgebra& A = f.target();
  const int D = cap.value_or(std::min(B.cap(), A.cap()));
  if (D > B.cap() || D > A.cap()) throw Error(ErrorCode::CapExceeded, "cap exceeds the algebras' caps");
  const Prime p = A.prime();
  {
    const CohomologyRing hb(f.source_ptr()), ha(f.target_ptr());
    const std::vector<FpMatrix> hf = induced_map(f, hb, ha);
    for (int n = 0; n < D; ++n)
      if (!is_iso(hf[n])) throw Error(ErrorCode::NotQuasiIso, "f is not a quasi-isomorphism in degree " + std::to_string(n));
  }
  Surjectivization out;
  out.cap = D;
  Presentation pres = B.presentation();
  pres.degree_cap = D;
  auto taken = [&](const std::string& s) {
    return std::any_of(pres.generators.begin(), pres.generators.end(), [&](const Generator& g) { return g.name == s; });
  };
  std::string prefix = "w";
  while (std::any_of(pres.generators.begin(), pres.generators.end(),
                     [&](const Generator& g) { return g.name.rfind(prefix, 0) == 0 || g.name.rfind("d" + prefix, 0) == 0; }))
    prefix = "_" + prefix;
  std::vector<Element> w_images;
  for (int n = 0; n < D; ++n) {
    const std::vector<FpVector> im = image_basis(f.matrix(n));
    const QuotientMap q = quotient_coords(p, im, A.dim(n));
    out.complement_dims.push_back(q.dim());
    if (n == 0 && q.dim() > 0) throw Error(ErrorCode::InvalidArgument, "f must be surjective in degree 0");
    for (std::size_t k = 0; k < q.complement.size(); ++k) {
      const std::string w = prefix + std::to_string(n) + "_" + std::to_string(k + 1);
      if (taken(w)) throw Error(ErrorCode::InvalidArgument, "generator name clash on " + w);
      const Element img{n, FpVector::unit(p, A.dim(n), q.complement[k])};
      pres.generators.push_back({w, n});
      pres.generators.push_back({"d" + w, n + 1});
      pres.differential[w] = "d" + w;
      // Lambda[w] (x) F[dw] is acyclic; use it when the square of the image vanishes
      if (p.is_two() && 2 * n <= A.cap() && A.multiply(img, img).is_zero()) pres.relations.push_back(w + "^2");
      w_images.push_back(img);
    }
  }
  out.algebra = DgAlgebra::compile(pres);
  std::vector<Element> to_a(f.images()), to_b;
  for (std::size_t g = 0; g < B.generator_count(); ++g) to_b.push_back(f.source().generator(g));
  for (const auto& w : w_images) {
    to_a.push_back(w);
    to_a.push_back(A.differential(w));
    to_b.push_back(B.zero(w.degree));
    to_b.push_back(B.zero(w.degree + 1));
  }
  out.to_target = Morphism::unchecked(out.algebra, f.target_ptr(), to_a);
  out.projection = Morphism::unchecked(out.algebra, f.source_ptr(), to_b);
  for (const Morphism* m : {&*out.to_target, &*out.projection}) {
    const MorphismReport rep = m->check();
    if (!rep.ok) throw Error(ErrorCode::NotAMorphism, "surjectivization: " + rep.witness);
    for (int n = 0; n < D; ++n)
      if (!m->surjective(n)) throw Error(ErrorCode::NotSurjective, "surjectivization: not onto in degree " + std::to_string(n));
  }
  const CohomologyRing hc(out.algebra), ha(f.target_ptr());
  const std::vector<FpMatrix> hf = induced_map(*out.to_target, hc, ha);
  for (int n = 0; n < D; ++n)
    if (!is_iso(hf[n]))
      throw Error(ErrorCode::NotQuasiIso, "the free algebra on the complement is not acyclic: H^" + std::to_string(n) +
                                              " of the surjectivization has dimension " + std::to_string(hc.dim(n)) +
                                              " against " + std::to_string(ha.dim(n)));
  return out;
}

// ---------------------------------------------------------------------------
// Cotriple product sets

ProductSet cotriple_product_set(const SullivanModel& model, const CohomologyRing& ha, const Element& sigma,
                                const ProductOptions& opts) {
  const DgAlgebra& M = *model.algebra;
  const DgAlgebra& A = ha.algebra();
  const Prime p = A.prime();
  if (sigma.degree >= model.cap || !ha.in_range(sigma.degree))
    throw Error(ErrorCode::CapExceeded, "sigma lies above the certified range");
  if (!M.differential(sigma).is_zero()) throw Error(ErrorCode::NotACocycle, "sigma = " + M.to_string(sigma));
  if (!model.in_higher_ideal(sigma))
    throw Error(ErrorCode::NotInIdeal, M.to_string(sigma) + " has a monomial purely in stage 0 generators");

  std::set<std::size_t> support;
  std::function<void(const Element&)> collect = [&](const Element& u) {
    for (std::size_t i = 0; i < u.coords.size(); ++i) {
      if (!u.coords[i]) continue;
      const Exponents& e = M.basis_monomial(u.degree, i);
      for (std::size_t g = 0; g < e.size(); ++g)
        if (e[g] && support.insert(g).second && model.generators[g].stage > 0) collect(M.differential(M.generator(g)));
    }
  };
  collect(sigma);
  const std::vector<std::size_t> order(support.begin(), support.end());

  auto size_of = [&](std::size_t dim) {
    std::uint64_t s = 1;
    for (std::size_t k = 0; k < dim; ++k) {
      if (s > opts.enumeration_bound) break;
      s *= p.value();
    }
    return s;
  };
  std::uint64_t total = 1;
  for (auto g : order) {
    const int deg = model.generators[g].degree;
    const std::size_t free = model.generators[g].stage == 0 ? ha.coboundaries(deg).dim() : ha.cocycles(deg).dim();
    total *= size_of(free);
    if (total > opts.enumeration_bound) throw Error(ErrorCode::TooLarge, "defining systems exceed the enumeration bound");
  }

  std::vector<Element> images;
  for (std::size_t i = 0; i < M.generator_count(); ++i) images.push_back(A.zero(M.monoid().degree(i)));
  std::set<FpVector> classes;
  std::size_t dead_ends = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == order.size()) {
      classes.insert(ha.project(Morphism::unchecked(model.algebra, model.base, images).apply(sigma)));
      return;
    }
    const std::size_t g = order[k];
    const SullivanGenerator& gen = model.generators[g];
    AffineSet choices = AffineSet::empty(p, A.dim(gen.degree));
    if (gen.stage == 0) {
      choices = AffineSet(p, A.dim(gen.degree), gen.image.coords, ha.coboundaries(gen.degree).basis());
    } else {
      const Morphism partial = Morphism::unchecked(model.algebra, model.base, images);
      choices = A.find_primitive(partial.apply(M.differential(M.generator(g))));
    }
    if (choices.is_empty()) {
      ++dead_ends;
      return;
    }
    choices.for_each([&](const FpVector& v) {
      images[g] = Element{gen.degree, v};
      rec(k + 1);
      return true;
    });
    images[g] = A.zero(gen.degree);
  };
  rec(0);

  ProductSet s;
  s.degree = sigma.degree;
  if (classes.empty()) {
    s.mode = ProductMode::Undefined;
    s.witness = "no defining system extends over the support of sigma";
    return s;
  }
  s.mode = ProductMode::Enumerated;
  s.elements.assign(classes.begin(), classes.end());
  (void)dead_ends;
  return s;
}

Element type1_pattern(const SullivanModel& model, const CohomologyRing& ha, const HClass& x, const HClass& y) {
  if (model.stages.size() < 2) throw Error(ErrorCode::InvalidArgument, "the type 1 pattern needs a stage 1 model");
  const DgAlgebra& M = *model.algebra;
  const Prime p = M.prime();
  auto stage0 = [&](const HClass& c) {
    Element u = M.zero(c.degree);
    std::size_t k = 0;
    for (std::size_t g = 0; g < model.generators.size(); ++g) {
      const auto& gen = model.generators[g];
      if (gen.stage != 0 || gen.degree != c.degree) continue;
      if (k < c.coords.size() && c.coords[k]) u = M.add(u, M.scale(M.generator(g), c.coords[k]));
      ++k;
    }
    if (k != ha.dim(c.degree)) throw Error(ErrorCode::InvalidArgument, "class degree outside the model");
    return u;
  };
  const Element z = M.multiply(stage0(x), stage0(y));
  const int deg = z.degree - 1;
  if (static_cast<int>(p.value()) * deg >= model.cap) throw Error(ErrorCode::CapExceeded, "the p-th power lies above the cap");
  std::vector<std::size_t> cands;
  std::vector<FpVector> cols;
  for (std::size_t g = 0; g < model.generators.size(); ++g)
    if (model.generators[g].stage == 1 && model.generators[g].degree == deg) {
      cands.push_back(g);
      cols.push_back(M.differential(M.generator(g)).coords);
    }
  const AffineSet sol = solve_affine(FpMatrix::from_columns(p, M.dim(z.degree), cols), z.coords);
  if (sol.is_empty()) throw Error(ErrorCode::NotInIdeal, "xy is not killed at stage 1");
  Element v = M.zero(deg);
  for (std::size_t k = 0; k < cands.size(); ++k)
    if (sol.point()[k]) v = M.add(v, M.scale(M.generator(cands[k]), sol.point()[k]));
  return M.power_p(v);
}

nlohmann::ordered_json sullivan_report(const SullivanModel& m) {
  Json j;
  j["prime"] = m.base->prime().value();
  j["cap"] = m.cap;
  j["stages"] = Json::array();
  for (std::size_t s = 0; s < m.stages.size(); ++s) {
    Json st;
    st["stage"] = s;
    st["generators"] = Json::array();
    for (auto g : m.stages[s].generators) {
      const auto& gen = m.generators[g];
      st["generators"].push_back(
          {{"name", gen.name}, {"degree", gen.degree}, {"d", gen.d}, {"image", m.base->to_string(gen.image)}});
    }
    st["surjective"] = m.stages[s].surjective;
    st["kernel_dims"] = m.stages[s].kernel_dims;
    j["stages"].push_back(st);
  }
  j["certified_through"] = m.cap - 1;
  j["quasi_iso"] = m.quasi_iso();
  return j;
}

nlohmann::ordered_json sullivan_report(const AlgebraPtr& base, int steps, std::optional<int> cap) {
  return sullivan_report(sullivan_step(base, steps, cap));
}

// ---------------------------------------------------------------------------
// Bicomplexes

Bicomplex::Bicomplex(Prime p, int columns, int rows)
    : p_(p), cols_(columns), rows_(rows), dims_(static_cast<std::size_t>(std::max(columns * rows, 0)), 0) {
  if (columns < 0 || rows < 0) throw Error(ErrorCode::InvalidDimension, "negative bicomplex size");
}

std::size_t Bicomplex::dim(int i, int j) const { return valid(i, j) ? dims_[i * rows_ + j] : 0; }

void Bicomplex::set_dim(int i, int j, std::size_t n) {
  if (!valid(i, j)) throw Error(ErrorCode::InvalidDimension, "bidegree outside the bicomplex");
  dims_[i * rows_ + j] = n;
  h_.erase({i, j});
  v_.erase({i, j});
  h_.erase({i - 1, j});
  v_.erase({i, j - 1});
}

void Bicomplex::set_horizontal(int i, int j, FpMatrix m) {
  if (m.rows() != dim(i + 1, j) || m.cols() != dim(i, j))
    throw Error(ErrorCode::InvalidDimension, "d' matrix has the wrong shape");
  h_.insert_or_assign({i, j}, std::move(m));
}

void Bicomplex::set_vertical(int i, int j, FpMatrix m) {
  if (m.rows() != dim(i, j + 1) || m.cols() != dim(i, j))
    throw Error(ErrorCode::InvalidDimension, "d'' matrix has the wrong shape");
  v_.insert_or_assign({i, j}, std::move(m));
}

FpMatrix Bicomplex::horizontal(int i, int j) const {
  auto it = h_.find({i, j});
  return it != h_.end() ? it->second : FpMatrix(p_, dim(i + 1, j), dim(i, j));
}

FpMatrix Bicomplex::vertical(int i, int j) const {
  auto it = v_.find({i, j});
  return it != v_.end() ? it->second : FpMatrix(p_, dim(i, j + 1), dim(i, j));
}

FpVector Bicomplex::apply_horizontal(int i, int j, const FpVector& v) const { return horizontal(i, j).apply(v); }
FpVector Bicomplex::apply_vertical(int i, int j, const FpVector& v) const { return vertical(i, j).apply(v); }

MorphismReport Bicomplex::check() const {
  auto at = [](int i, int j) { return " at (" + std::to_string(i) + ", " + std::to_string(j) + ")"; };
  for (int i = 0; i < cols_; ++i)
    for (int j = 0; j < rows_; ++j) {
      if (!(horizontal(i + 1, j) * horizontal(i, j)).is_zero()) return {false, "d'^2 != 0" + at(i, j)};
      if (!(vertical(i, j + 1) * vertical(i, j)).is_zero()) return {false, "d''^2 != 0" + at(i, j)};
      const FpMatrix a = horizontal(i, j + 1) * vertical(i, j);
      const FpMatrix b = vertical(i + 1, j) * horizontal(i, j);
      for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
          if (p_.add(a(r, c), b(r, c)) != 0) return {false, "d'd'' + d''d' != 0" + at(i, j)};
    }
  return {};
}

std::size_t Bicomplex::total_dim(int n) const {
  std::size_t s = 0;
  for (int i = 0; i < cols_; ++i) s += dim(i, n - i);
  return s;
}

std::size_t Bicomplex::block_offset(int n, int i) const {
  std::size_t s = 0;
  for (int k = 0; k < i; ++k) s += dim(k, n - k);
  return s;
}

FpMatrix Bicomplex::total_differential(int n) const {
  FpMatrix out(p_, total_dim(n + 1), total_dim(n));
  for (int i = 0; i < cols_; ++i) {
    const int j = n - i;
    if (!valid(i, j) || dim(i, j) == 0) continue;
    const std::size_t src = block_offset(n, i);
    const FpMatrix h = horizontal(i, j), v = vertical(i, j);
    const std::size_t th = block_offset(n + 1, i + 1), tv = block_offset(n + 1, i);
    for (std::size_t r = 0; r < h.rows(); ++r)
      for (std::size_t c = 0; c < h.cols(); ++c) out(th + r, src + c) = h(r, c);
    for (std::size_t r = 0; r < v.rows(); ++r)
      for (std::size_t c = 0; c < v.cols(); ++c) out(tv + r, src + c) = p_.add(out(tv + r, src + c), v(r, c));
  }
  return out;
}

std::size_t spectral_page_dim(const Bicomplex& b, int r, int i, int n) {
  if (r < 1) throw Error(ErrorCode::InvalidArgument, "pages start at r = 1");
  const Subspace z = cycles(b, r, i, n);
  return z.dim() - page_boundaries(b, r, i, n).dim();
}

StaircaseReport staircase_check(const Bicomplex& b, int i, int j, const std::vector<FpVector>& chain) {
  const Prime p = b.prime();
  const int len = static_cast<int>(chain.size());
  if (len == 0) throw Error(ErrorCode::InvalidArgument, "empty staircase");
  for (int s = 0; s < len; ++s)
    if (chain[s].size() != b.dim(i + s, j - s))
      throw Error(ErrorCode::InvalidDimension, "c_" + std::to_string(s + 1) + " does not fit its bidegree");
  for (int s = 0; s + 1 < len; ++s)
    if (!(b.apply_horizontal(i + s, j - s, chain[s]) == b.apply_vertical(i + s + 1, j - s - 1, chain[s + 1])))
      throw Error(ErrorCode::NotAStaircase, "d'c_" + std::to_string(s + 1) + " != d''c_" + std::to_string(s + 2) +
                                                " (first failing s = " + std::to_string(s + 1) + ")");
  const int n = i + j;
  const Scalar sign_n = len % 2 == 1 ? 1 : p.neg(1);  // (-1)^{len-1}
  auto embed = [&](int deg, int col, const FpVector& v) {
    FpVector out(p, b.total_dim(deg));
    const std::size_t off = b.block_offset(deg, col);
    for (std::size_t k = 0; k < v.size(); ++k) out[off + k] = v[k];
    return out;
  };
  FpVector c(p, b.total_dim(n));
  for (int s = 0; s < len; ++s) c.axpy(s % 2 == 0 ? 1 : p.neg(1), embed(n, i + s, chain[s]));
  const FpMatrix dn = b.total_differential(n);
  const FpVector dc1 = b.apply_vertical(i, j, chain[0]);
  FpVector last(p, b.total_dim(n + 1));
  if (i + len < b.columns()) last = embed(n + 1, i + len, b.apply_horizontal(i + len - 1, j - len + 1, chain[len - 1]));
  last.scale(sign_n);
  StaircaseReport rep;
  rep.length = len;
  FpVector rhs = embed(n + 1, i, dc1);
  rhs += last;
  rep.total_identity = dn.apply(c) == rhs;
  rep.applicable = dc1.is_zero();
  for (int r = 1; r <= len; ++r) rep.page_dims.push_back(spectral_page_dim(b, r, i, n));
  if (!rep.applicable) {
    rep.detail = "d''c_1 != 0, so c_1 does not define a class on E_1";
    return rep;
  }
  // x = c_1 + y with y in F^{i+1} and Dx in F^{i+len}, found by solving
  const std::vector<std::size_t> ycols = filtration_coords(b, n, i + 1);
  const std::vector<std::size_t> high = filtration_coords(b, n + 1, i + len);
  std::vector<bool> is_high(b.total_dim(n + 1), false);
  for (auto k : high) is_high[k] = true;
  std::vector<std::size_t> low;
  for (std::size_t k = 0; k < is_high.size(); ++k)
    if (!is_high[k]) low.push_back(k);
  const FpVector c1 = embed(n, i, chain[0]);
  const FpVector dx1 = dn.apply(c1);
  FpMatrix sys(p, low.size(), ycols.size());
  FpVector rhs_low(p, low.size());
  for (std::size_t r = 0; r < low.size(); ++r) {
    rhs_low[r] = p.neg(dx1[low[r]]);
    for (std::size_t k = 0; k < ycols.size(); ++k) sys(r, k) = dn(low[r], ycols[k]);
  }
  const AffineSet ys = solve_affine(sys, rhs_low);
  rep.survives = !ys.is_empty();
  if (!rep.survives) {
    rep.detail = "c_1 does not survive to E_" + std::to_string(len);
    return rep;
  }
  FpVector x = c1;
  for (std::size_t k = 0; k < ycols.size(); ++k) x[ycols[k]] = p.add(x[ycols[k]], ys.point()[k]);
  const Subspace den = page_boundaries(b, len, i + len, n + 1);
  rep.differential_matches = den.contains(dn.apply(x) - last);
  rep.differential_nonzero = !den.contains(last);
  rep.detail = std::string("d_") + std::to_string(len) + "[c_1] = (-1)^" + std::to_string(len - 1) + "[d'c_" +
               std::to_string(len) + "]" + (rep.differential_nonzero ? ", nonzero" : ", zero") + " on E_" +
               std::to_string(len);
  return rep;
}

}  // namespace obstrukt
