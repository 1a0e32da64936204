#include "khmut/bracket.hpp"

#include <algorithm>

#include "khmut/parallel.hpp"
#include "khmut/union_find.hpp"

namespace khmut {

namespace {

struct Representatives {
  std::vector<int> arc, circle;
};

// One edge of every component of a traced flat.
Representatives representatives(const TangleDiagram& t, const FlatTangle& f) {
  Representatives r{std::vector<int>(f.num_arcs(), -1), std::vector<int>(f.num_circles(), -1)};
  for (int e = t.num_edges() - 1; e >= 0; --e) {
    Component c = f.component_of_edge(e);
    (c.kind == Component::Kind::arc ? r.arc : r.circle)[c.index] = e;
  }
  return r;
}

}  // namespace

Morphism saddle(const TangleDiagram& t, Resolution eps, int c, FlatRef source, FlatRef target) {
  if (c < 0 || c >= t.num_crossings()) throw InputError("crossing index out of range");
  if (eps[c]) throw InputError("saddle needs a resolution with value 0 at the crossing");
  Resolution eps1 = eps.flipped(c);
  if (!source) source = resolve(t, eps);
  if (!target) target = resolve(t, eps1);
  if (!source->has_trace() || !target->has_trace()) throw InputError("saddle needs traced flats");
  UnionFind uf(t.num_edges());
  for (int k = 0; k < t.num_crossings(); ++k) {
    const auto& x = t.crossing(k);
    if (k == c) {
      uf.unite(x[0], x[1]);
      uf.unite(x[1], x[2]);
      uf.unite(x[2], x[3]);
    } else if (!eps[k]) {
      uf.unite(x[0], x[1]);
      uf.unite(x[2], x[3]);
    } else {
      uf.unite(x[1], x[2]);
      uf.unite(x[3], x[0]);
    }
  }
  const CurveSet& cs = boundary_curves(*source, *target);
  Representatives rs = representatives(t, *source), rt = representatives(t, *target);
  std::vector<int> group(cs.count, -1);
  for (int k = 0; k < source->num_arcs(); ++k) group[cs.arc1[k]] = uf.find(rs.arc[k]);
  for (int i = 0; i < source->num_circles(); ++i) group[cs.circle1[i]] = uf.find(rs.circle[i]);
  for (int j = 0; j < target->num_circles(); ++j) group[cs.circle2[j]] = uf.find(rt.circle[j]);
  return surface_morphism({source, 0}, {target, 0}, group);
}

const CobObject& Bracket::object_of(Resolution eps) const {
  auto [i, j] = position.at(eps.bits);
  return complex.objects.at(i)[j];
}

Bracket khovanov_bracket(const TangleDiagram& t, const BracketOptions& options) {
  int n = t.num_crossings();
  if (n > 24) throw InputError("too many crossings for the cube of resolutions");
  Bracket b{t, {}, 0, 0, {}, {}};
  if (options.signs) {
    std::tie(b.n_plus, b.n_minus) = *options.signs;
    if (b.n_plus + b.n_minus != n) throw InputError("sign override does not match crossing count");
  } else {
    if (!t.is_oriented()) throw InputError("bracket needs an oriented diagram");
    std::tie(b.n_plus, b.n_minus) = crossing_signs(t);
  }
  size_t vertices = size_t{1} << n;
  std::vector<FlatRef> flats(vertices);
  parallel_for(vertices, [&](size_t e) { flats[e] = resolve(t, {e}, options.marked_edges); },
               options.jobs);

  b.states.assign(n + 1, {});
  for (uint64_t e = 0; e < vertices; ++e) b.states[popcount(e)].push_back(e);
  b.complex.objects.low = -b.n_minus;
  for (int w = 0; w <= n; ++w) {
    MatObject part;
    for (size_t j = 0; j < b.states[w].size(); ++j) {
      uint64_t e = b.states[w][j];
      b.position[e] = {w - b.n_minus, static_cast<int>(j)};
      part.push_back({flats[e], w + b.n_plus - 2 * b.n_minus});
    }
    b.complex.objects.parts.push_back(std::move(part));
  }
  for (int w = 0; w < n; ++w) {
    const MatObject& src = b.complex.objects.parts[w];
    const MatObject& tgt = b.complex.objects.parts[w + 1];
    MatMorphism d(src, tgt);
    std::vector<std::vector<MatEntry>> cols(src.size());
    parallel_for(src.size(), [&](size_t j) {
      uint64_t e = b.states[w][j];
      for (int c = 0; c < n; ++c) {
        if ((e >> c) & 1u) continue;
        uint64_t e1 = e | (uint64_t{1} << c);
        Morphism s = saddle(t, {e}, c, flats[e], flats[e1]);
        cols[j].push_back({b.position.at(e1).second, s.terms()});
      }
    }, options.jobs);
    for (size_t j = 0; j < src.size(); ++j) d.set_column(static_cast<int>(j), std::move(cols[j]));
    b.complex.d.parts.emplace(w - b.n_minus, std::move(d));
  }
  return b;
}

GradedMap crossing_differential(const Bracket& b, int c) {
  GradedMap out{1, {}};
  for (const auto& [i, d] : b.complex.d.parts) {
    MatMorphism dc(d.source(), d.target());
    int k = i - b.low();
    for (int j = 0; j < d.cols(); ++j) {
      uint64_t e = b.states[k][j];
      if ((e >> c) & 1u) continue;
      int row = b.position.at(e | (uint64_t{1} << c)).second;
      dc.add(row, j, d.entry_terms(row, j));
    }
    out.parts.emplace(i, std::move(dc));
  }
  return out;
}

}  // namespace khmut
