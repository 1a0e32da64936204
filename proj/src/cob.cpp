#include "khmut/cob.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "khmut/union_find.hpp"

namespace khmut {

void canonicalize(TermSet& terms) {
  std::sort(terms.begin(), terms.end());
  size_t out = 0;
  for (size_t i = 0; i < terms.size();) {
    size_t j = i;
    while (j < terms.size() && terms[j] == terms[i]) ++j;
    if ((j - i) % 2 == 1) terms[out++] = terms[i];
    i = j;
  }
  terms.resize(out);
}

TermSet xor_terms(const TermSet& x, const TermSet& y) {
  TermSet out;
  out.reserve(x.size() + y.size());
  std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  return out;
}

namespace {

template <class Key, class Value, class Hash = std::hash<Key>>
class Memo {
 public:
  template <class Make>
  const Value& get(const Key& key, Make&& make) {
    {
      std::shared_lock lock(mutex_);
      auto it = map_.find(key);
      if (it != map_.end()) return *it->second;
    }
    auto value = std::make_unique<Value>(make());
    std::unique_lock lock(mutex_);
    auto [it, inserted] = map_.try_emplace(key, std::move(value));
    return *it->second;
  }

 private:
  std::shared_mutex mutex_;
  std::unordered_map<Key, std::unique_ptr<Value>, Hash> map_;
};

struct KeyHash {
  template <size_t N>
  size_t operator()(const std::array<uint64_t, N>& k) const {
    uint64_t h = 0x9e3779b97f4a7c15ull;
    for (uint64_t x : k) h = (h ^ x) * 0x100000001b3ull + (h >> 29);
    return static_cast<size_t>(h);
  }
};

template <size_t N>
using ShapeKey = std::array<uint64_t, N>;

CurveSet compute_curves(const FlatTangle& o1, const FlatTangle& o2) {
  if (o1.points() != o2.points() || o1.region() != o2.region())
    throw InputError("objects do not share region and boundary points");
  CurveSet cs;
  cs.arc1.assign(o1.num_arcs(), -1);
  cs.arc2.assign(o2.num_arcs(), -1);
  std::array<bool, kNumPoints> seen{};
  for (int p = 0; p < kNumPoints; ++p) {
    if (!((o1.points() >> p) & 1u) || seen[p]) continue;
    int id = cs.count++;
    uint8_t pts = 0;
    int q = p;
    do {
      seen[q] = true;
      pts |= static_cast<uint8_t>(1u << q);
      cs.point[q] = id;
      cs.arc1[o1.arc_of_point(q)] = id;
      int r = o1.partner(q);
      seen[r] = true;
      pts |= static_cast<uint8_t>(1u << r);
      cs.point[r] = id;
      cs.arc2[o2.arc_of_point(r)] = id;
      q = o2.partner(r);
    } while (q != p);
    cs.cycle_points.push_back(pts);
  }
  cs.num_cycles = cs.count;
  for (int i = 0; i < o1.num_circles(); ++i) cs.circle1.push_back(cs.count++);
  for (int i = 0; i < o2.num_circles(); ++i) cs.circle2.push_back(cs.count++);
  if (cs.count > 64) throw InputError("more than 64 boundary curves");
  return cs;
}

Memo<ShapeKey<2>, CurveSet, KeyHash>& curve_memo() {
  static Memo<ShapeKey<2>, CurveSet, KeyHash> memo;
  return memo;
}

}  // namespace

const CurveSet& boundary_curves(const FlatTangle& o1, const FlatTangle& o2) {
  return curve_memo().get({o1.shape_key(), o2.shape_key()},
                          [&] { return compute_curves(o1, o2); });
}

std::string describe_curve(const CurveSet& cs, int curve) {
  if (curve < cs.num_cycles) {
    std::string s;
    for (int p = 0; p < kNumPoints; ++p)
      if ((cs.cycle_points[curve] >> p) & 1u) s.push_back(point_name(p));
    return s;
  }
  for (size_t i = 0; i < cs.circle1.size(); ++i)
    if (cs.circle1[i] == curve) return "s" + std::to_string(i);
  for (size_t i = 0; i < cs.circle2.size(); ++i)
    if (cs.circle2[i] == curve) return "t" + std::to_string(i);
  return "?";
}

// ---------------------------------------------------------------- reduce

namespace {

struct Partial {
  uint64_t dots;
  uint32_t t;
};

// Neck-cut expansion of one genus-0 component carrying d dots.
void expand_component(std::span<const int> curves, int d, uint64_t dots, uint32_t t,
                      std::vector<Partial>& out) {
  if (curves.empty()) {
    if (d % 2 == 1) out.push_back({dots, t + static_cast<uint32_t>((d - 1) / 2)});
    return;
  }
  if (curves.size() == 1) {
    uint64_t bit = uint64_t{1} << curves[0];
    out.push_back({d % 2 ? dots | bit : dots, t + static_cast<uint32_t>(d / 2)});
    return;
  }
  int c = curves[0];
  auto rest = curves.subspan(1);
  expand_component(rest, d, dots | (uint64_t{1} << c), t, out);
  expand_component(rest, d + 1, dots, t, out);
}

}  // namespace

TermSet reduce(const PreCobordism& pre, std::span<const int> cut_order) {
  std::vector<Partial> acc{{0, pre.t}};
  for (const auto& comp : pre.components) {
    if (comp.genus >= 1) return {};
    std::vector<int> curves;
    if (cut_order.empty()) {
      for (int c = 0; c < 64; ++c)
        if ((comp.curves >> c) & 1u) curves.push_back(c);
    } else {
      for (int c : cut_order)
        if ((comp.curves >> c) & 1u) curves.push_back(c);
    }
    std::vector<Partial> local;
    expand_component(curves, comp.dots, 0, 0, local);
    std::vector<Partial> next;
    for (const auto& a : acc)
      for (const auto& b : local) next.push_back({a.dots | b.dots, a.t + b.t});
    acc = std::move(next);
    if (acc.empty()) return {};
  }
  TermSet out;
  for (const auto& a : acc) out.push_back({a.dots, a.t});
  canonicalize(out);
  return out;
}

// ---------------------------------------------------------------- gluing plans

namespace {

// Gluing of two normal-form surfaces along a shared 1-manifold. Pieces are the
// disks of the two factors; atoms are the arcs (chi 1) and circles (chi 0)
// along which pieces are glued.
struct GluePlan {
  bool annihilates = false;
  std::vector<std::pair<int, int>> pass1, pass2;  // (piece curve, output curve)
  std::vector<std::pair<int, int>> spheres;       // (piece of side 1, piece of side 2)
  uint64_t sphere_mask2 = 0;
  struct Block {
    uint64_t mask1 = 0, mask2 = 0;
    std::vector<int> outputs;
    std::vector<uint64_t> spread;  // output bits of each local dotting
  };
  std::vector<Block> blocks;
};

struct PlanSpec {
  int n1 = 0, n2 = 0;
  struct Atom {
    int piece1, piece2, chi;
  };
  std::vector<Atom> atoms;
  std::vector<std::pair<int, int>> outputs;  // output curve -> (side, piece)
};

GluePlan build_plan(const PlanSpec& spec) {
  int n = spec.n1 + spec.n2;
  UnionFind uf(n);
  for (const auto& a : spec.atoms) uf.unite(a.piece1, spec.n1 + a.piece2);
  std::vector<int> chi(n, 0), pieces(n, 0);
  for (int v = 0; v < n; ++v) ++pieces[uf.find(v)];
  for (int v = 0; v < n; ++v) chi[v] = 0;
  for (int v = 0; v < n; ++v) chi[uf.find(v)] += 1;
  for (const auto& a : spec.atoms) chi[uf.find(a.piece1)] -= a.chi;
  std::vector<std::vector<int>> outputs(n);
  for (int c = 0; c < static_cast<int>(spec.outputs.size()); ++c) {
    auto [side, piece] = spec.outputs[c];
    outputs[uf.find(side == 0 ? piece : spec.n1 + piece)].push_back(c);
  }
  GluePlan plan;
  for (int r = 0; r < n; ++r) {
    if (uf.find(r) != r) continue;
    int b = static_cast<int>(outputs[r].size());
    int twice_genus = 2 - b - chi[r];
    if (twice_genus < 0 || twice_genus % 2 != 0)
      throw std::logic_error("glued surface has inconsistent Euler characteristic");
    if (twice_genus > 0) {
      plan.annihilates = true;
      return plan;
    }
    std::vector<int> side1, side2;
    for (int v = 0; v < n; ++v)
      if (uf.find(v) == r) (v < spec.n1 ? side1 : side2).push_back(v < spec.n1 ? v : v - spec.n1);
    if (pieces[r] == 1 && b == 1) {
      if (!side1.empty()) plan.pass1.push_back({side1[0], outputs[r][0]});
      else plan.pass2.push_back({side2[0], outputs[r][0]});
    } else if (b == 0 && side1.size() == 1 && side2.size() == 1) {
      plan.spheres.push_back({side1[0], side2[0]});
      plan.sphere_mask2 |= uint64_t{1} << side2[0];
    } else {
      GluePlan::Block blk;
      for (int v : side1) blk.mask1 |= uint64_t{1} << v;
      for (int v : side2) blk.mask2 |= uint64_t{1} << v;
      blk.outputs = outputs[r];
      if (b <= 12) {
        blk.spread.resize(size_t{1} << b);
        for (uint64_t u = 0; u < blk.spread.size(); ++u) {
          uint64_t bits = 0;
          for (int k = 0; k < b; ++k)
            if ((u >> k) & 1u) bits |= uint64_t{1} << blk.outputs[k];
          blk.spread[u] = bits;
        }
      }
      plan.blocks.push_back(std::move(blk));
    }
  }
  return plan;
}

uint64_t spread_bits(const GluePlan::Block& blk, uint64_t u) {
  if (!blk.spread.empty()) return blk.spread[u];
  uint64_t bits = 0;
  for (size_t k = 0; k < blk.outputs.size(); ++k)
    if ((u >> k) & 1u) bits |= uint64_t{1} << blk.outputs[k];
  return bits;
}

TermSet apply_plan(const GluePlan& plan, const TermSet& s1, const TermSet& s2) {
  if (plan.annihilates || s1.empty() || s2.empty()) return {};
  TermSet out;
  std::vector<Partial> acc, next;
  auto emit = [&](const Term& a, const Term& b) {
    uint64_t base = 0;
    for (auto [p, o] : plan.pass1)
      if ((a.dots >> p) & 1u) base |= uint64_t{1} << o;
    for (auto [p, o] : plan.pass2)
      if ((b.dots >> p) & 1u) base |= uint64_t{1} << o;
    acc.assign(1, {base, a.t + b.t});
    for (const auto& blk : plan.blocks) {
      int d = popcount(a.dots & blk.mask1) + popcount(b.dots & blk.mask2);
      int nb = static_cast<int>(blk.outputs.size());
      int top = d + nb - 1;
      if (top < 0) return;
      next.clear();
      for (uint64_t u = 0; u < (uint64_t{1} << nb); ++u) {
        int pc = popcount(u);
        if (pc > top || (top - pc) % 2 != 0) continue;
        uint64_t bits = spread_bits(blk, u);
        uint32_t dt = static_cast<uint32_t>((top - pc) / 2);
        for (const auto& x : acc) next.push_back({x.dots | bits, x.t + dt});
      }
      std::swap(acc, next);
      if (acc.empty()) return;
    }
    for (const auto& x : acc) out.push_back({x.dots, x.t});
  };
  if (plan.spheres.empty()) {
    for (const auto& a : s1)
      for (const auto& b : s2) emit(a, b);
  } else {
    std::vector<std::pair<uint64_t, int>> keyed;
    keyed.reserve(s2.size());
    for (int j = 0; j < static_cast<int>(s2.size()); ++j)
      keyed.push_back({s2[j].dots & plan.sphere_mask2, j});
    std::sort(keyed.begin(), keyed.end());
    for (const auto& a : s1) {
      uint64_t need = 0;
      for (auto [p1, p2] : plan.spheres)
        if (!((a.dots >> p1) & 1u)) need |= uint64_t{1} << p2;
      auto it = std::lower_bound(keyed.begin(), keyed.end(), std::make_pair(need, -1));
      for (; it != keyed.end() && it->first == need; ++it) emit(a, s2[it->second]);
    }
  }
  canonicalize(out);
  return out;
}

Memo<ShapeKey<3>, GluePlan, KeyHash>& compose_memo() {
  static Memo<ShapeKey<3>, GluePlan, KeyHash> memo;
  return memo;
}

Memo<ShapeKey<4>, GluePlan, KeyHash>& tensor_memo() {
  static Memo<ShapeKey<4>, GluePlan, KeyHash> memo;
  return memo;
}

Memo<ShapeKey<2>, GluedFlat, KeyHash>& glue_memo() {
  static Memo<ShapeKey<2>, GluedFlat, KeyHash> memo;
  return memo;
}

Memo<ShapeKey<1>, TermSet, KeyHash>& identity_memo() {
  static Memo<ShapeKey<1>, TermSet, KeyHash> memo;
  return memo;
}

GluePlan compose_plan(const FlatTangle& o1, const FlatTangle& o2, const FlatTangle& o3) {
  const CurveSet& c12 = boundary_curves(o1, o2);
  const CurveSet& c23 = boundary_curves(o2, o3);
  const CurveSet& c13 = boundary_curves(o1, o3);
  PlanSpec spec;
  spec.n1 = c12.count;
  spec.n2 = c23.count;
  for (int k = 0; k < o2.num_arcs(); ++k) spec.atoms.push_back({c12.arc2[k], c23.arc1[k], 1});
  for (int k = 0; k < o2.num_circles(); ++k)
    spec.atoms.push_back({c12.circle2[k], c23.circle1[k], 0});
  spec.outputs.assign(c13.count, {-1, -1});
  for (int k = 0; k < o1.num_arcs(); ++k) spec.outputs[c13.arc1[k]] = {0, c12.arc1[k]};
  for (int i = 0; i < o1.num_circles(); ++i) spec.outputs[c13.circle1[i]] = {0, c12.circle1[i]};
  for (int j = 0; j < o3.num_circles(); ++j) spec.outputs[c13.circle2[j]] = {1, c23.circle2[j]};
  return build_plan(spec);
}

GluedFlat compute_glue(const FlatTangle& x, const FlatTangle& y) {
  PointSet shared = x.points() & y.points();
  if (shared) {
    bool ok = (x.region() == RegionKind::disk && y.region() == RegionKind::complement) ||
              (x.region() == RegionKind::complement && y.region() == RegionKind::disk);
    if (!ok) throw InputError("tensor needs a disk object and a complement object");
  }
  PointSet rest = x.points() ^ y.points();
  const FlatTangle* side[2] = {&x, &y};
  auto on = [&](int s, int p) { return ((side[s]->points() >> p) & 1u) != 0; };
  std::array<int8_t, kNumPoints> partner{-1, -1, -1, -1};
  std::array<GluedFlat::Source, kNumPoints> arc_src{};
  std::array<bool, kNumPoints> seen{};
  for (int p = 0; p < kNumPoints; ++p) {
    if (!((rest >> p) & 1u) || partner[p] >= 0) continue;
    int s = on(0, p) ? 0 : 1;
    GluedFlat::Source src{s, {Component::Kind::arc, side[s]->arc_of_point(p)}};
    int q = p;
    while (true) {
      int r = side[s]->partner(q);
      if ((rest >> r) & 1u) {
        partner[p] = static_cast<int8_t>(r);
        partner[r] = static_cast<int8_t>(p);
        arc_src[p] = arc_src[r] = src;
        break;
      }
      seen[r] = true;
      s = 1 - s;
      q = r;
    }
  }
  GluedFlat g;
  for (int p = 0; p < kNumPoints; ++p) {
    if (!((shared >> p) & 1u) || seen[p]) continue;
    g.circle_source.push_back({0, {Component::Kind::arc, x.arc_of_point(p)}});
    int q = p;
    do {
      seen[q] = true;
      int r = x.partner(q);
      seen[r] = true;
      q = y.partner(r);
    } while (q != p);
  }
  for (int i = 0; i < x.num_circles(); ++i)
    g.circle_source.push_back({0, {Component::Kind::circle, i}});
  for (int i = 0; i < y.num_circles(); ++i)
    g.circle_source.push_back({1, {Component::Kind::circle, i}});
  RegionKind region = RegionKind::plane;
  if (rest) region = (x.points() & rest) ? x.region() : y.region();
  g.flat = make_flat(region, rest, partner, static_cast<int>(g.circle_source.size()));
  g.arc_source.resize(g.flat->num_arcs());
  for (int p = 0; p < kNumPoints; ++p)
    if ((rest >> p) & 1u) g.arc_source[g.flat->arc_of_point(p)] = arc_src[p];
  return g;
}

GluePlan tensor_plan(const FlatTangle& x1, const FlatTangle& x2, const FlatTangle& y1,
                     const FlatTangle& y2) {
  const CurveSet& cx = boundary_curves(x1, x2);
  const CurveSet& cy = boundary_curves(y1, y2);
  const GluedFlat& g1 = glue_flats(x1, y1);
  const GluedFlat& g2 = glue_flats(x2, y2);
  const CurveSet& cg = boundary_curves(*g1.flat, *g2.flat);
  PlanSpec spec;
  spec.n1 = cx.count;
  spec.n2 = cy.count;
  PointSet shared = x1.points() & y1.points();
  for (int p = 0; p < kNumPoints; ++p)
    if ((shared >> p) & 1u) spec.atoms.push_back({cx.point[p], cy.point[p], 1});
  const CurveSet* cs[2] = {&cx, &cy};
  auto piece = [&](const GluedFlat::Source& src, bool top) {
    const CurveSet& c = *cs[src.side];
    int idx = src.component.index;
    if (src.component.kind == Component::Kind::arc) return (top ? c.arc2 : c.arc1)[idx];
    return (top ? c.circle2 : c.circle1)[idx];
  };
  spec.outputs.assign(cg.count, {-1, -1});
  for (int k = 0; k < g1.flat->num_arcs(); ++k)
    spec.outputs[cg.arc1[k]] = {g1.arc_source[k].side, piece(g1.arc_source[k], false)};
  for (int i = 0; i < g1.flat->num_circles(); ++i)
    spec.outputs[cg.circle1[i]] = {g1.circle_source[i].side, piece(g1.circle_source[i], false)};
  for (int j = 0; j < g2.flat->num_circles(); ++j)
    spec.outputs[cg.circle2[j]] = {g2.circle_source[j].side, piece(g2.circle_source[j], true)};
  return build_plan(spec);
}

}  // namespace

TermSet compose_terms(const FlatTangle& o1, const FlatTangle& o2, const FlatTangle& o3,
                      const TermSet& s2, const TermSet& s1) {
  if (s1.empty() || s2.empty()) return {};
  const GluePlan& plan = compose_memo().get({o1.shape_key(), o2.shape_key(), o3.shape_key()},
                                            [&] { return compose_plan(o1, o2, o3); });
  return apply_plan(plan, s1, s2);
}

Morphism compose(const Morphism& s2, const Morphism& s1) {
  if (!(s1.target() == s2.source())) throw InputError("mismatched middle object in compose");
  return Morphism(s1.source(), s2.target(),
                  compose_terms(*s1.source().flat, *s1.target().flat, *s2.target().flat,
                                s2.terms(), s1.terms()));
}

const GluedFlat& glue_flats(const FlatTangle& x, const FlatTangle& y) {
  return glue_memo().get({x.shape_key(), y.shape_key()}, [&] { return compute_glue(x, y); });
}

CobObject tensor(const CobObject& x, const CobObject& y) {
  return {glue_flats(*x.flat, *y.flat).flat, x.shift + y.shift};
}

TermSet tensor_terms(const FlatTangle& x1, const FlatTangle& x2, const FlatTangle& y1,
                     const FlatTangle& y2, const TermSet& sx, const TermSet& sy) {
  if (sx.empty() || sy.empty()) return {};
  const GluePlan& plan =
      tensor_memo().get({x1.shape_key(), x2.shape_key(), y1.shape_key(), y2.shape_key()},
                        [&] { return tensor_plan(x1, x2, y1, y2); });
  return apply_plan(plan, sx, sy);
}

Morphism tensor(const Morphism& x, const Morphism& y) {
  return Morphism(tensor(x.source(), y.source()), tensor(x.target(), y.target()),
                  tensor_terms(*x.source().flat, *x.target().flat, *y.source().flat,
                               *y.target().flat, x.terms(), y.terms()));
}

// ---------------------------------------------------------------- morphisms

Morphism::Morphism(CobObject source, CobObject target, TermSet terms)
    : source_(std::move(source)), target_(std::move(target)), terms_(std::move(terms)) {
  const CurveSet& cs = curves();
  uint64_t allowed = cs.count == 64 ? ~uint64_t{0} : (uint64_t{1} << cs.count) - 1;
  for (const auto& t : terms_)
    if (t.dots & ~allowed) throw InputError("term dots a curve that does not exist");
  if (!std::is_sorted(terms_.begin(), terms_.end()) ||
      std::adjacent_find(terms_.begin(), terms_.end()) != terms_.end())
    canonicalize(terms_);
}

Morphism& Morphism::operator+=(const Morphism& o) {
  if (!(source_ == o.source_) || !(target_ == o.target_))
    throw InputError("adding morphisms between different objects");
  terms_ = xor_terms(terms_, o.terms_);
  return *this;
}

Morphism Morphism::times_t(uint32_t n) const {
  TermSet out = terms_;
  for (auto& t : out) t.t += n;
  return Morphism(source_, target_, std::move(out));
}

Morphism surface_morphism(const CobObject& source, const CobObject& target,
                          const std::vector<int>& group_of_curve) {
  std::map<int, uint64_t> groups;
  for (int c = 0; c < static_cast<int>(group_of_curve.size()); ++c)
    groups[group_of_curve[c]] |= uint64_t{1} << c;
  PreCobordism pre;
  for (auto [g, mask] : groups) pre.components.push_back({mask, 0, 0});
  return Morphism(source, target, reduce(pre));
}

TermSet identity_terms(const FlatTangle& o) {
  return identity_memo().get({o.shape_key()}, [&] {
    const CurveSet& cs = boundary_curves(o, o);
    PreCobordism pre;
    for (int k = 0; k < cs.num_cycles; ++k) pre.components.push_back({uint64_t{1} << k, 0, 0});
    for (int i = 0; i < o.num_circles(); ++i)
      pre.components.push_back(
          {(uint64_t{1} << cs.circle1[i]) | (uint64_t{1} << cs.circle2[i]), 0, 0});
    return reduce(pre);
  });
}

Morphism Morphism::identity(const CobObject& o) { return Morphism(o, o, identity_terms(*o.flat)); }

int term_degree(const Morphism& s, const Term& term) {
  const CurveSet& cs = s.curves();
  return cs.count - s.source().flat->num_points() / 2 - 2 * popcount(term.dots) -
         4 * static_cast<int>(term.t) + (s.target().shift - s.source().shift);
}

std::optional<int> degree(const Morphism& s) {
  if (s.is_zero()) return std::nullopt;
  int d = term_degree(s, s.terms().front());
  for (const auto& t : s.terms())
    if (term_degree(s, t) != d) throw VerificationError("mixed-degree term set");
  return d;
}

int curve_of_component(const Morphism& s, Component comp, bool on_target) {
  const CurveSet& cs = s.curves();
  if (comp.kind == Component::Kind::arc) return (on_target ? cs.arc2 : cs.arc1).at(comp.index);
  return (on_target ? cs.circle2 : cs.circle1).at(comp.index);
}

TermSet add_dot(const TermSet& terms, int curve) {
  uint64_t bit = uint64_t{1} << curve;
  TermSet out = terms;
  for (auto& t : out) {
    if (t.dots & bit) {
      t.dots &= ~bit;
      ++t.t;
    } else {
      t.dots |= bit;
    }
  }
  canonicalize(out);
  return out;
}

Morphism dot_multiply(const Morphism& s, int point) {
  if (!((s.source().flat->points() >> point) & 1u))
    throw InputError(std::string("point ") + point_name(point) + " not present");
  return Morphism(s.source(), s.target(), add_dot(s.terms(), s.curves().point[point]));
}

Morphism dot_multiply_component(const Morphism& s, Component comp, bool on_target) {
  return Morphism(s.source(), s.target(),
                  add_dot(s.terms(), curve_of_component(s, comp, on_target)));
}

Morphism dot_endomorphism(const CobObject& o, int point) {
  return dot_multiply(Morphism::identity(o), point);
}

TermSet dot_derivative_terms(const TermSet& terms) {
  TermSet out;
  for (const auto& t : terms)
    for (uint64_t rest = t.dots; rest; rest &= rest - 1) {
      uint64_t bit = rest & (~rest + 1);
      out.push_back({t.dots & ~bit, t.t});
    }
  canonicalize(out);
  return out;
}

Morphism dot_derivative(const Morphism& s) {
  return Morphism(s.source(), s.target(), dot_derivative_terms(s.terms()));
}

namespace {

TermSet permute_bits(const TermSet& terms, const std::vector<int>& to) {
  TermSet out;
  out.reserve(terms.size());
  for (const auto& t : terms) {
    uint64_t bits = 0;
    for (uint64_t rest = t.dots; rest; rest &= rest - 1)
      bits |= uint64_t{1} << to[__builtin_ctzll(rest)];
    out.push_back({bits, t.t});
  }
  canonicalize(out);
  return out;
}

int first_point(uint8_t pts) { return __builtin_ctz(pts); }

}  // namespace

Morphism reversed(const Morphism& s) {
  const CurveSet& cs = s.curves();
  const CurveSet& cr = boundary_curves(*s.target().flat, *s.source().flat);
  std::vector<int> to(cs.count);
  for (int k = 0; k < cs.num_cycles; ++k) to[k] = cr.point[first_point(cs.cycle_points[k])];
  for (size_t i = 0; i < cs.circle1.size(); ++i) to[cs.circle1[i]] = cr.circle2[i];
  for (size_t j = 0; j < cs.circle2.size(); ++j) to[cs.circle2[j]] = cr.circle1[j];
  return Morphism(s.target(), s.source(), permute_bits(s.terms(), to));
}

namespace {
constexpr std::array<int, kNumPoints> kRz{2, 3, 0, 1};
}

FlatRef rotate_flat_z(const FlatTangle& o) {
  if (o.region() != RegionKind::disk || o.points() != kAllPoints)
    throw InputError("rotation needs a disk object with boundary {a,b,c,d}");
  std::array<int8_t, kNumPoints> partner{};
  for (int p = 0; p < kNumPoints; ++p) partner[kRz[p]] = static_cast<int8_t>(kRz[o.partner(p)]);
  if (partner == flat_o0()->partners() && o.num_circles() == 0) return flat_o0();
  if (partner == flat_o1()->partners() && o.num_circles() == 0) return flat_o1();
  return make_flat(o.region(), o.points(), partner, o.num_circles());
}

Morphism rotate_cob(const Morphism& s) {
  CobObject src{rotate_flat_z(*s.source().flat), s.source().shift};
  CobObject tgt{rotate_flat_z(*s.target().flat), s.target().shift};
  const CurveSet& cs = s.curves();
  const CurveSet& cr = boundary_curves(*src.flat, *tgt.flat);
  std::vector<int> to(cs.count);
  for (int k = 0; k < cs.num_cycles; ++k) to[k] = cr.point[kRz[first_point(cs.cycle_points[k])]];
  for (size_t i = 0; i < cs.circle1.size(); ++i) to[cs.circle1[i]] = cr.circle1[i];
  for (size_t j = 0; j < cs.circle2.size(); ++j) to[cs.circle2[j]] = cr.circle2[j];
  return Morphism(src, tgt, permute_bits(s.terms(), to));
}

}  // namespace khmut
