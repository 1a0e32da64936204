#include "khmut/mutation.hpp"

#include <algorithm>

#include "json.hpp"

namespace khmut {

bool ArcTraversal::is_self_crossing(int k) const {
  return std::any_of(self_pairs.begin(), self_pairs.end(),
                     [k](const auto& p) { return p.first == k || p.second == k; });
}

std::map<std::string, int> ArcTraversal::marked_edges() const {
  std::map<std::string, int> out;
  for (size_t k = 0; k < edges.size(); ++k) out[mark_name(static_cast<int>(k) + 1)] = edges[k];
  return out;
}

ArcTraversal trace_arc(const TangleDiagram& outer) {
  if (outer.region().kind != RegionKind::complement || outer.region().points != kAllPoints)
    throw InputError("the arc is traced in a four-ended outer tangle");
  if (connectivity(outer) != Connectivity::crossed)
    throw HypothesisError("outer tangle does not have crossed connectivity");
  ArcTraversal arc;
  auto [edge, end] = outer.at_point(0);
  const int limit = 2 * outer.num_crossings() + 1;
  while (true) {
    arc.edges.push_back(edge);
    if (static_cast<int>(arc.edges.size()) > limit) throw InputError("arc does not terminate");
    const EdgeEnd& far = outer.ends(edge)[1 - end];
    if (far.on_boundary()) {
      if (far.point != 2) throw HypothesisError("the strand from a does not end at c");
      break;
    }
    arc.crossings.push_back(far.crossing);
    std::tie(edge, end) = outer.at_slot(far.crossing, (far.slot + 2) % 4);
  }
  for (int k = 1; k <= arc.m(); ++k)
    for (int l = k + 1; l <= arc.m(); ++l)
      if (arc.crossings[k - 1] == arc.crossings[l - 1]) arc.self_pairs.push_back({k, l});
  return arc;
}

// ---------------------------------------------------------------- dot rotation

namespace {

bool in_cprime(const CobObject& o) {
  const FlatTangle& f = *o.flat;
  return f.region() == RegionKind::disk && f.points() == kAllPoints && f.num_circles() == 0;
}

}  // namespace

Morphism dot_rotate(const Morphism& s) {
  if (!in_cprime(s.source()) || !in_cprime(s.target()))
    throw InputError("dot rotation acts on morphisms between O_0 and O_1");
  Morphism ds = dot_derivative(s);
  return s + dot_multiply(ds, 0) + dot_multiply(ds, 2);
}

Complex dot_rotation(const Complex& c) {
  for (const auto& part : c.objects.parts)
    for (const auto& o : part)
      if (!in_cprime(o)) throw InputError("dot rotation needs a straightened complex");
  Complex out{c.objects, map_entries(c.d, dot_rotate)};
  if (!verify_complex(out).ok()) throw VerificationError("dot rotation broke d^2 = 0");
  return out;
}

// ---------------------------------------------------------------- migration

GradedMap point_dot_map(const Bracket& b, int point) {
  GradedMap out{0, {}};
  for (size_t k = 0; k < b.complex.objects.parts.size(); ++k) {
    const MatObject& o = b.complex.objects.parts[k];
    MatMorphism m(o, o);
    for (int j = 0; j < m.cols(); ++j) m.add(j, j, dot_endomorphism(o[j], point));
    out.parts.emplace(b.low() + static_cast<int>(k), std::move(m));
  }
  return out;
}

std::vector<GradedMap> dot_multiplication_endos(const Bracket& outer, const ArcTraversal& arc) {
  std::vector<GradedMap> out;
  for (int k = 1; k <= arc.m() + 1; ++k) {
    std::string name = ArcTraversal::mark_name(k);
    GradedMap x{0, {}};
    for (size_t lvl = 0; lvl < outer.complex.objects.parts.size(); ++lvl) {
      const MatObject& o = outer.complex.objects.parts[lvl];
      MatMorphism m(o, o);
      for (int j = 0; j < m.cols(); ++j) {
        auto comp = o[j].flat->mark(name);
        if (!comp) throw InputError("point " + name + " is not marked in the bracket");
        m.add(j, j, dot_multiply_component(Morphism::identity(o[j]), *comp));
      }
      x.parts.emplace(outer.low() + static_cast<int>(lvl), std::move(m));
    }
    out.push_back(std::move(x));
  }
  return out;
}

GradedMap migration_homotopy(const Bracket& outer, const ArcTraversal& arc, int k) {
  if (k < 1 || k > arc.m()) throw InputError("migration homotopy index out of range");
  GradedMap dk = crossing_differential(outer, arc.crossings[k - 1]);
  GradedMap h{-1, {}};
  for (const auto& [i, d] : dk.parts) {
    MatMorphism r(d.target(), d.source());
    for (int j = 0; j < d.cols(); ++j)
      for (const auto& e : d.column(j)) r.add(j, e.row, reversed(d.entry(e.row, j)));
    h.parts.emplace(i + 1, std::move(r));
  }
  return h;
}

// ---------------------------------------------------------------- diagrams

std::pair<TangleDiagram, TangleDiagram> orient_mutation_pair(const TangleDiagram& inner,
                                                             const TangleDiagram& outer) {
  try {
    return orient_pair(inner, outer);
  } catch (const OrientationConflict&) {
  }
  try {
    return orient_pair(reverse(inner), outer);
  } catch (const OrientationConflict&) {
    throw OrientationConflict("orientation of the mutant cannot be fixed by reversing the disk");
  }
}

std::pair<TangleDiagram, TangleDiagram> mutate_pair(const TangleDiagram& inner,
                                                    const TangleDiagram& outer) {
  auto [in, out] = orient_mutation_pair(inner, outer);
  return orient_mutation_pair(rotate_z(in), out);
}

TangleDiagram mutate_diagram(const TangleDiagram& inner, const TangleDiagram& outer) {
  auto [in, out] = mutate_pair(inner, outer);
  return glue(in, out);
}

// ---------------------------------------------------------------- phi

PhiData build_phi(const TangleDiagram& inner_in, const TangleDiagram& outer_in,
                  const PhiOptions& options) {
  if (inner_in.region().kind != RegionKind::disk || inner_in.region().points != kAllPoints)
    throw InputError("the mutation disk must hold a four-ended tangle");
  auto [inner, outer] = orient_mutation_pair(inner_in, outer_in);
  ArcTraversal arc = trace_arc(outer);

  BracketOptions in_opts, out_opts;
  in_opts.jobs = out_opts.jobs = options.jobs;
  out_opts.marked_edges = arc.marked_edges();
  Bracket bt = khovanov_bracket(inner, in_opts);
  Bracket bo = khovanov_bracket(outer, out_opts);

  Complex straight = enhanced_deloop(bt.complex);
  GradedMap dot_delta = map_entries(straight.d, dot_derivative);
  TensorLayout layout = tensor_layout(straight.objects, bo.complex.objects);
  Complex a = complex_tensor(straight, bo.complex);
  Complex b = complex_tensor(dot_rotation(straight), bo.complex);

  std::vector<GradedMap> hs;
  for (int k = 1; k <= arc.m(); ++k) hs.push_back(migration_homotopy(bo, arc, k));

  std::vector<int> order;
  for (int k = 1; k <= arc.m(); ++k)
    if (!options.skip_self_crossings || !arc.is_self_crossing(k)) order.push_back(k);

  GradedMap one = identity_map(a.objects);
  GradedMap phi = one;
  for (int k : order) {
    GradedMap phik = one + tensor_maps(dot_delta, hs[k - 1], layout, layout);
    phi = compose(phi, phik);
  }
  return PhiData{std::move(bt), std::move(bo), std::move(arc), std::move(straight),
                 std::move(dot_delta), std::move(layout), std::move(a), std::move(b),
                 std::move(hs), std::move(order), std::move(phi)};
}

bool MutationCertificate::valid() const {
  return std::all_of(stages.begin(), stages.end(), [](const auto& s) { return s.passed; });
}

std::string MutationCertificate::failed_stage() const {
  for (const auto& s : stages)
    if (!s.passed) return s.name;
  return {};
}

namespace {

nlohmann::json table_value(const HomologyTable& h) { return nlohmann::json::parse(table_json(h)); }

std::optional<EntryLocation> first_nonzero_degree(const GradedMap& f) {
  for (const auto& [i, m] : f.parts)
    for (int j = 0; j < m.cols(); ++j)
      for (const auto& e : m.column(j))
        if (degree(m.entry(e.row, j)).value_or(0) != 0) return EntryLocation{i, e.row, j};
  return std::nullopt;
}

}  // namespace

std::string MutationCertificate::to_json() const {
  nlohmann::json j;
  j["valid"] = valid();
  j["failed_stage"] = failed_stage().empty() ? nlohmann::json(nullptr) : nlohmann::json(failed_stage());
  nlohmann::json st = nlohmann::json::array();
  for (const auto& s : stages) {
    nlohmann::json e{{"name", s.name}, {"passed", s.passed}};
    if (s.counterexample)
      e["counterexample"] = {{"degree", s.counterexample->degree},
                             {"row", s.counterexample->row},
                             {"col", s.counterexample->col}};
    st.push_back(e);
  }
  j["stages"] = st;
  j["arc"] = {{"edges", arc.edges}, {"crossings", arc.crossings}, {"self_pairs", arc.self_pairs}};
  j["order"] = order;
  j["objects"] = objects;
  j["components"] = {components_before, components_after};
  j["tables"] = {{"before", {{"kh", table_value(kh_before)}, {"lee", table_value(lee_before)}}},
                 {"after", {{"kh", table_value(kh_after)}, {"lee", table_value(lee_after)}}}};
  return j.dump(1);
}

MutationCertificate verify_mutation(const TangleDiagram& inner, const TangleDiagram& outer,
                                    const PhiOptions& options) {
  PhiData p = build_phi(inner, outer, options);
  MutationCertificate cert;
  cert.arc = p.arc;
  cert.order = p.order;
  cert.objects = p.a.objects.total_size();
  auto stage = [&](std::string name, std::optional<EntryLocation> diff) {
    cert.stages.push_back({std::move(name), !diff, diff});
  };

  const GradedObject& outer_objects = p.outer.complex.objects;
  GradedMap one = identity_map(p.a.objects);
  GradedMap delta1 = tensor_maps(p.straight.d, identity_map(outer_objects), p.layout, p.layout);
  GradedMap oned = tensor_maps(identity_map(p.straight.objects), p.outer.complex.d, p.layout,
                               p.layout);

  cert.stages.push_back({"same_objects", p.a.objects == p.b.objects, std::nullopt});
  stage("phi_degree_zero", first_nonzero_degree(p.phi));
  // (a) phi o phi = 1 (x) 1.
  stage("phi_squared", first_difference(compose(p.phi, p.phi), one));
  // (b) phi commutes with delta (x) 1.
  stage("phi_commutes_delta", first_difference(compose(p.phi, delta1), compose(delta1, p.phi)));
  // (c) phi (1 (x) d) phi = 1 (x) d + (d_dot delta) (x) (X_a + X_c).
  GradedMap xs = point_dot_map(p.outer, 0) + point_dot_map(p.outer, 2);
  stage("phi_conjugates_outer",
        first_difference(compose(p.phi, compose(oned, p.phi)),
                         oned + tensor_maps(p.dot_delta, xs, p.layout, p.layout)));
  // (d) phi d_A phi = d_B.
  stage("phi_intertwines", first_difference(compose(p.phi, compose(p.a.d, p.phi)), p.b.d));

  // (e) homology of the two links.
  TangleDiagram before = glue(p.inner.diagram, p.outer.diagram);
  TangleDiagram after = mutate_diagram(p.inner.diagram, p.outer.diagram);
  cert.components_before = count_link_components(before);
  cert.components_after = count_link_components(after);
  cert.kh_before = khovanov_homology(before, 0, true, options.jobs);
  cert.kh_after = khovanov_homology(after, 0, true, options.jobs);
  cert.lee_before = khovanov_homology(before, 1, true, options.jobs);
  cert.lee_after = khovanov_homology(after, 1, true, options.jobs);
  cert.stages.push_back({"homology_equal",
                         cert.kh_before == cert.kh_after &&
                             cert.lee_before.total() == cert.lee_after.total(),
                         std::nullopt});
  return cert;
}

}  // namespace khmut
