// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when a
// criterion fails, except for criteria listed in kUnattainable, whose failure
// is reported but expected (see README).
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "khmut/mutation.hpp"

using namespace khmut;
namespace fs = std::filesystem;

namespace {

const std::set<int> kUnattainable = {7};

struct Outcome {
  bool pass = true;
  std::string detail;
};

fs::path fixture_dir() { return fs::path(KHMUT_FIXTURE_DIR); }

TangleDiagram fixture(const std::string& rel) {
  return load_diagram((fixture_dir() / rel).string());
}

std::vector<fs::path> all_fixtures() {
  std::vector<fs::path> out;
  for (const char* sub : {"knots", "tangles"})
    for (const auto& e : fs::directory_iterator(fixture_dir() / sub)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::string, TangleDiagram>> closed_fixtures(int max_crossings) {
  std::vector<std::pair<std::string, TangleDiagram>> out;
  for (const auto& p : all_fixtures()) {
    TangleDiagram d = load_diagram(p.string());
    if (d.is_closed() && d.num_crossings() <= max_crossings)
      out.emplace_back(p.filename().string(), std::move(d));
  }
  return out;
}

std::vector<std::string> crossed_outer_fixtures() {
  std::vector<std::string> out;
  for (const auto& p : all_fixtures()) {
    TangleDiagram d = load_diagram(p.string());
    if (d.region().kind == RegionKind::complement && d.region().points == kAllPoints &&
        connectivity(d) == Connectivity::crossed)
      out.push_back("tangles/" + p.filename().string());
  }
  return out;
}

// Records the first failure only.
struct Checker {
  Outcome out;
  int checks = 0;
  void operator()(bool ok, const std::string& what) {
    ++checks;
    if (!ok && out.pass) {
      out.pass = false;
      out.detail = what;
    }
  }
  Outcome done(const std::string& summary) {
    if (out.pass) out.detail = summary + " (" + std::to_string(checks) + " checks)";
    return out;
  }
};

Morphism random_morphism(std::mt19937& rng, const CobObject& s, const CobObject& t) {
  const CurveSet& cs = boundary_curves(*s.flat, *t.flat);
  TermSet terms;
  int n = static_cast<int>(rng() % 4);
  for (int k = 0; k < n; ++k)
    terms.push_back({rng() & ((uint64_t{1} << cs.count) - 1), static_cast<uint32_t>(rng() % 2)});
  canonicalize(terms);
  return Morphism(s, t, terms);
}

FlatRef disk_with_circles(bool o1, int n) {
  return make_flat(RegionKind::disk, kAllPoints,
                   o1 ? flat_o1()->partners() : flat_o0()->partners(), n);
}

// ---------------------------------------------------------------- criteria

Outcome relation_engine() {
  Checker check;
  check(reduce({{{0, 0, 0}}, 0}).empty(), "undotted sphere is not 0");
  check(reduce({{{0, 0, 3}}, 0}) == TermSet{{0, 1}}, "three-dotted sphere is not t");
  check(reduce({{{0b11, 0, 0}}, 0}) == TermSet{{0b01, 0}, {0b10, 0}}, "neck cutting");
  check(reduce({{{0b1, 0, 2}}, 0}) == TermSet{{0, 1}}, "double dot");
  for (int b = 0; b <= 4; ++b)
    for (int genus = 0; genus <= 1; ++genus)
      for (int d = 0; d <= 5; ++d) {
        std::vector<int> order(b);
        std::iota(order.begin(), order.end(), 0);
        PreCobordism pre{{{(uint64_t{1} << b) - 1, genus, d}}, 0};
        TermSet first = reduce(pre, order);
        do {
          check(reduce(pre, order) == first, "cut order changes the reduction at b=" +
                                                 std::to_string(b) + " d=" + std::to_string(d));
        } while (std::next_permutation(order.begin(), order.end()));
      }
  return check.done("reduce examples and every cut order for b <= 4");
}

Outcome brackets_are_complexes() {
  Checker check;
  int n = 0;
  for (const auto& p : all_fixtures()) {
    TangleDiagram d = orient_default(load_diagram(p.string()));
    if (d.num_crossings() > 11) continue;
    ComplexReport r = verify_complex(khovanov_bracket(d).complex);
    check(r.d_squared_zero, p.filename().string() + ": d^2 != 0");
    check(r.degree_zero, p.filename().string() + ": differential of nonzero degree");
    ++n;
  }
  return check.done(std::to_string(n) + " fixtures including KT and Conway");
}

Outcome oracle_equivalence() {
  Checker check;
  auto links = closed_fixtures(8);
  for (const auto& [name, d] : links)
    for (int t : {0, 1})
      check(khovanov_homology(d, t) == oracle_state_sum(d, t),
            name + ": pipeline and oracle differ at t=" + std::to_string(t));
  return check.done(std::to_string(links.size()) + " closed fixtures, t in {0,1}");
}

Outcome euler_is_jones() {
  Checker check;
  auto links = closed_fixtures(8);
  for (const auto& [name, d] : links)
    check(euler_characteristic(khovanov_homology(d, 0)) == jones_polynomial(d),
          name + ": Euler characteristic " +
              format_polynomial(euler_characteristic(khovanov_homology(d, 0))) + " vs Jones " +
              format_polynomial(jones_polynomial(d)));
  return check.done(std::to_string(links.size()) + " closed fixtures");
}

Outcome lemma_suites() {
  Checker check;
  // Delooping isomorphisms.
  std::vector<MatObject> objects;
  for (int k = 1; k <= 3; ++k) objects.push_back({{circles_flat(k), k}});
  for (int k = 1; k <= 2; ++k)
    objects.push_back({{disk_with_circles(false, k), 0}, {disk_with_circles(true, k), -1}});
  for (const auto& o : objects) {
    check(compose(deloop_from(o), deloop_into(o)) == MatMorphism::identity(o), "H o G != id");
    check(compose(deloop_into(o), deloop_from(o)) == MatMorphism::identity(deloop_object(o)),
          "G o H != id");
  }
  // Leibniz and nilpotence of the dot derivative.
  std::mt19937 rng(2024);
  std::vector<CobObject> disk = {{flat_o0(), 0}, {flat_o1(), 0}, {disk_with_circles(false, 1), 0},
                                 {disk_with_circles(true, 1), 0}};
  for (int trial = 0; trial < 1000; ++trial) {
    CobObject a = disk[rng() % 4], b = disk[rng() % 4], c = disk[rng() % 4];
    Morphism f = random_morphism(rng, a, b), g = random_morphism(rng, b, c);
    check(dot_derivative(compose(g, f)) ==
              compose(dot_derivative(g), f) + compose(g, dot_derivative(f)),
          "Leibniz rule fails on trial " + std::to_string(trial));
    check(dot_derivative(dot_derivative(f)).is_zero(), "derivative does not square to 0");
  }
  // R_z = R_dot on all normal forms with at most two dots and t^0, t^1.
  for (const auto& src : {flat_o0(), flat_o1()})
    for (const auto& tgt : {flat_o0(), flat_o1()}) {
      int n = boundary_curves(*src, *tgt).count;
      for (uint64_t dots = 0; dots < (uint64_t{1} << n); ++dots)
        for (uint32_t tp : {0u, 1u}) {
          if (popcount(dots) > 2) continue;
          Morphism m({src, 0}, {tgt, 0}, {{dots, tp}});
          check(rotate_cob(m) == dot_rotate(m), "R_z != R_dot");
        }
    }
  // Dot migration identities on every crossed outer fixture.
  for (const auto& name : crossed_outer_fixtures()) {
    TangleDiagram t = fixture(name);
    ArcTraversal arc = trace_arc(t);
    BracketOptions opts;
    opts.marked_edges = arc.marked_edges();
    Bracket b = khovanov_bracket(t, opts);
    auto xs = dot_multiplication_endos(b, arc);
    std::vector<GradedMap> hs, dc;
    for (int k = 1; k <= arc.m(); ++k) hs.push_back(migration_homotopy(b, arc, k));
    for (int c = 0; c < t.num_crossings(); ++c) dc.push_back(crossing_differential(b, c));
    const GradedMap& d = b.complex.d;
    for (int k = 1; k <= arc.m(); ++k) {
      const GradedMap& h = hs[k - 1];
      std::string at = name + " k=" + std::to_string(k);
      check(compose(h, h).is_zero(), at + ": h^2 != 0");
      for (const auto& g : hs) check(compose(h, g) == compose(g, h), at + ": h_k h_l != h_l h_k");
      for (int c = 0; c < t.num_crossings(); ++c)
        if (c != arc.crossings[k - 1])
          check(compose(h, dc[c]) == compose(dc[c], h), at + ": h_k d_c != d_c h_k");
      check(compose(d, h) + compose(h, d) == xs[k - 1] + xs[k], at + ": dh + hd != X_k + X_k+1");
      check(compose(h, compose(d, h)).is_zero(), at + ": h d h != 0");
    }
  }
  return check.done("delooping, 1000 Leibniz pairs, R_z = R_dot, dot migration");
}

Outcome mutation_theorem() {
  Checker check;
  struct Case {
    const char *label, *inner, *outer;
  };
  std::ostringstream summary;
  for (auto [label, in, out] :
       {Case{"2-crossing", "tangles/one_crossing_disk.json", "tangles/one_crossing_outer.json"},
        Case{"5-crossing", "tangles/clasp_disk.json", "tangles/clasp_outer.json"},
        Case{"KT/Conway", "tangles/kt_inner.json", "tangles/kt_outer.json"}}) {
    auto start = std::chrono::steady_clock::now();
    MutationCertificate cert = verify_mutation(fixture(in), fixture(out));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check(cert.valid(), std::string(label) + ": stage " + cert.failed_stage() + " failed");
    check(cert.kh_before == cert.kh_after, std::string(label) + ": Khovanov tables differ");
    check(cert.lee_before.total() == cert.lee_after.total(),
          std::string(label) + ": Lee totals differ");
    summary << label << " " << std::fixed << std::setprecision(2) << secs << " s; ";
  }
  // The mutant of KT is the Conway knot fixture, up to homology.
  TangleDiagram conway = mutate_diagram(fixture("tangles/kt_inner.json"),
                                        fixture("tangles/kt_outer.json"));
  check(khovanov_homology(conway, 0) == khovanov_homology(fixture("knots/conway.pd"), 0),
        "mutant of KT differs from the Conway fixture");
  return check.done(summary.str() + "phi^2 = 1, phi d_A = d_B phi");
}

Outcome lee_dimension() {
  Checker check;
  int differ = 0, total = 0;
  std::string example;
  auto links = closed_fixtures(8);
  for (const auto& [name, d] : links) {
    int lee = khovanov_homology(d, 1).total();
    int expected = 1 << count_link_components(d);
    ++total;
    if (lee != expected) {
      ++differ;
      if (example.empty())
        example = name + " has " + std::to_string(lee) + " != " + std::to_string(expected);
    }
  }
  check(differ == 0, std::to_string(differ) + " of " + std::to_string(total) +
                         " fixtures differ, e.g. " + example +
                         "; over F_2 the t = 1 theory is isomorphic to ungraded t = 0");
  return check.done(std::to_string(total) + " closed fixtures");
}

Outcome reidemeister_sanity() {
  Checker check;
  std::vector<std::string> names = {"knots/trefoil_left.pd", "knots/trefoil_left_4.pd",
                                    "knots/trefoil_left_5.pd"};
  std::set<int> sizes;
  for (const auto& n : names) sizes.insert(fixture(n).num_crossings());
  check(sizes == std::set<int>{3, 4, 5}, "trefoil fixtures do not have 3, 4 and 5 crossings");
  for (int t : {0, 1}) {
    HomologyTable first = khovanov_homology(fixture(names[0]), t);
    for (const auto& n : names)
      check(khovanov_homology(fixture(n), t) == first, n + ": table differs at t=" + std::to_string(t));
  }
  return check.done("3, 4 and 5 crossing trefoils, t in {0,1}");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria = {
      {1, "relation engine", relation_engine},
      {2, "d^2 = 0 and degree 0 on all fixtures", brackets_are_complexes},
      {3, "pipeline equals state-sum oracle", oracle_equivalence},
      {4, "Euler characteristic equals Jones", euler_is_jones},
      {5, "lemma suites", lemma_suites},
      {6, "mutation theorem", mutation_theorem},
      {7, "Lee total is 2^components", lee_dimension},
      {8, "Reidemeister sanity", reidemeister_sanity},
  };
  int unexpected = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool known = kUnattainable.count(c.id) > 0;
    if (!o.pass && !known) ++unexpected;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " ["
              << std::fixed << std::setprecision(2) << secs << " s] " << o.detail
              << (!o.pass && known ? " (documented as unattainable)" : "") << std::endl;
  }
  return unexpected == 0 ? 0 : 1;
}
