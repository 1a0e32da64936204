#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "khmut/cob.hpp"
#include "khmut/union_find.hpp"

using namespace khmut;

namespace {

CobObject obj(FlatRef f, int shift = 0) { return {std::move(f), shift}; }
CobObject empty_obj() { return obj(empty_flat()); }
CobObject circle_obj(int n = 1) { return obj(circles_flat(n)); }

FlatRef outer_o1() {
  static FlatRef f = make_flat(RegionKind::complement, kAllPoints, {1, 0, 3, 2}, 0);
  return f;
}
FlatRef outer_o0() {
  static FlatRef f = make_flat(RegionKind::complement, kAllPoints, {3, 2, 1, 0}, 0);
  return f;
}
FlatRef disk_with_circle(bool o1) {
  return make_flat(RegionKind::disk, kAllPoints, o1 ? flat_o1()->partners() : flat_o0()->partners(),
                   1);
}

Morphism saddle_o0_o1() {
  return surface_morphism(obj(flat_o0()), obj(flat_o1()), {0});
}

// Composition through the literal neck-cutting recursion: glue with union-find,
// compute genus from the Euler characteristic and reduce.
TermSet naive_compose(const Morphism& s2, const Morphism& s1) {
  const FlatTangle& o1 = *s1.source().flat;
  const FlatTangle& o2 = *s1.target().flat;
  const FlatTangle& o3 = *s2.target().flat;
  const CurveSet& c12 = s1.curves();
  const CurveSet& c23 = s2.curves();
  const CurveSet& c13 = boundary_curves(o1, o3);
  TermSet out;
  for (const auto& a : s1.terms())
    for (const auto& b : s2.terms()) {
      int n1 = c12.count, n2 = c23.count;
      UnionFind uf(n1 + n2);
      std::vector<int> chi(n1 + n2, 1);
      for (int k = 0; k < o2.num_arcs(); ++k) uf.unite(c12.arc2[k], n1 + c23.arc1[k]);
      for (int k = 0; k < o2.num_circles(); ++k) uf.unite(c12.circle2[k], n1 + c23.circle1[k]);
      std::map<int, PreComponent> comps;
      std::map<int, int> euler;
      for (int v = 0; v < n1 + n2; ++v) {
        int r = uf.find(v);
        comps[r];
        euler[r] += 1;
        bool dotted = v < n1 ? (a.dots >> v) & 1u : (b.dots >> (v - n1)) & 1u;
        comps[r].dots += dotted;
      }
      for (int k = 0; k < o2.num_arcs(); ++k) euler[uf.find(c12.arc2[k])] -= 1;
      auto add_out = [&](int curve, int node) { comps[uf.find(node)].curves |= uint64_t{1} << curve; };
      for (int k = 0; k < o1.num_arcs(); ++k) add_out(c13.arc1[k], c12.arc1[k]);
      for (int i = 0; i < o1.num_circles(); ++i) add_out(c13.circle1[i], c12.circle1[i]);
      for (int j = 0; j < o3.num_circles(); ++j) add_out(c13.circle2[j], n1 + c23.circle2[j]);
      PreCobordism pre;
      pre.t = a.t + b.t;
      for (auto& [r, c] : comps) {
        int bnd = popcount(c.curves);
        c.genus = (2 - bnd - euler[r]) / 2;
        pre.components.push_back(c);
      }
      out = xor_terms(out, reduce(pre));
    }
  return out;
}

Morphism random_morphism(std::mt19937& rng, const CobObject& s, const CobObject& t, int max_terms = 3) {
  const CurveSet& cs = boundary_curves(*s.flat, *t.flat);
  TermSet terms;
  int n = std::uniform_int_distribution<int>(0, max_terms)(rng);
  for (int k = 0; k < n; ++k) {
    uint64_t dots = std::uniform_int_distribution<uint64_t>(0, (uint64_t{1} << cs.count) - 1)(rng);
    uint32_t tp = std::uniform_int_distribution<uint32_t>(0, 1)(rng);
    terms.push_back({dots, tp});
  }
  canonicalize(terms);
  return Morphism(s, t, terms);
}

Morphism random_term(std::mt19937& rng, const CobObject& s, const CobObject& t) {
  while (true) {
    Morphism m = random_morphism(rng, s, t, 1);
    if (!m.is_zero()) return m;
  }
}

std::vector<CobObject> disk_objects() {
  return {obj(flat_o0()), obj(flat_o1()), obj(disk_with_circle(false)),
          obj(disk_with_circle(true))};
}

std::vector<CobObject> plane_objects() {
  return {empty_obj(), circle_obj(1), circle_obj(2), circle_obj(3)};
}

}  // namespace

TEST_CASE("boundary curve counts") {
  CHECK(boundary_curves(*flat_o0(), *flat_o0()).count == 2);
  CHECK(boundary_curves(*flat_o0(), *flat_o1()).count == 1);
  CHECK(boundary_curves(*circles_flat(1), *circles_flat(1)).count == 2);
  CHECK(boundary_curves(*disk_with_circle(false), *flat_o1()).count == 2);
  CHECK_THROWS_AS(boundary_curves(*flat_o0(), *circles_flat(1)), InputError);
}

TEST_CASE("local relations") {
  SUBCASE("undotted sphere vanishes") {
    CHECK(reduce({{{0, 0, 0}}, 0}).empty());
  }
  SUBCASE("three-dotted sphere is t") {
    CHECK(reduce({{{0, 0, 3}}, 0}) == TermSet{{0, 1}});
    CHECK(reduce({{{0, 0, 1}}, 0}) == TermSet{{0, 0}});
  }
  SUBCASE("neck cutting") {
    CHECK(reduce({{{0b11, 0, 0}}, 0}) == TermSet{{0b01, 0}, {0b10, 0}});
  }
  SUBCASE("double dot") {
    CHECK(reduce({{{0b1, 0, 2}}, 0}) == TermSet{{0, 1}});
    CHECK(reduce({{{0b1, 0, 3}}, 0}) == TermSet{{1, 1}});
  }
  SUBCASE("positive genus vanishes") {
    CHECK(reduce({{{0b1, 1, 0}}, 0}).empty());
    CHECK(reduce({{{0b1, 0, 0}, {0b10, 1, 1}}, 0}).empty());
  }
}

TEST_CASE("reduction is confluent over every cut order") {
  for (int b = 0; b <= 4; ++b)
    for (int d = 0; d <= 5; ++d) {
      std::vector<int> order(b);
      std::iota(order.begin(), order.end(), 0);
      uint64_t mask = (uint64_t{1} << b) - 1;
      PreCobordism pre{{{mask, 0, d}}, 0};
      TermSet first = reduce(pre, order);
      do {
        CHECK(reduce(pre, order) == first);
      } while (std::next_permutation(order.begin(), order.end()));
    }
}

TEST_CASE("composition examples") {
  Morphism cup(empty_obj(), circle_obj(), {{0, 0}});
  Morphism dotted_cup(empty_obj(), circle_obj(), {{1, 0}});
  Morphism cap(circle_obj(), empty_obj(), {{0, 0}});
  Morphism dotted_cap(circle_obj(), empty_obj(), {{1, 0}});
  CHECK(compose(cap, cup).is_zero());
  CHECK(compose(dotted_cap, cup) == Morphism::identity(empty_obj()));
  CHECK(compose(cap, dotted_cup) == Morphism::identity(empty_obj()));
  CHECK(compose(dotted_cap, dotted_cup).is_zero());
  Morphism twice = Morphism(circle_obj(), empty_obj(), add_dot({{1, 0}}, 0));
  CHECK(twice == Morphism(circle_obj(), empty_obj(), {{0, 1}}));
  CHECK(compose(Morphism(circle_obj(), empty_obj(), {{1, 1}}), Morphism(empty_obj(), circle_obj(), {{0, 0}})) ==
        Morphism::identity(empty_obj()).times_t(1));
  // cup o cap is the neck-cut form of the identity tube, not of id itself.
  CHECK(compose(cup, dotted_cap) + compose(dotted_cup, cap) == Morphism::identity(circle_obj()));
  CHECK(Morphism::identity(circle_obj()).terms() == TermSet{{0b01, 0}, {0b10, 0}});
  CHECK_THROWS_AS(compose(cup, cup), InputError);
}

TEST_CASE("identity is neutral and composition associative") {
  std::mt19937 rng(7);
  for (const auto& objs : {disk_objects(), plane_objects()})
    for (int trial = 0; trial < 300; ++trial) {
      auto pick = [&] { return objs[rng() % objs.size()]; };
      CobObject a = pick(), b = pick(), c = pick(), d = pick();
      Morphism f = random_morphism(rng, a, b);
      Morphism g = random_morphism(rng, b, c);
      Morphism h = random_morphism(rng, c, d);
      REQUIRE(compose(Morphism::identity(b), f) == f);
      REQUIRE(compose(f, Morphism::identity(a)) == f);
      REQUIRE(compose(h, compose(g, f)) == compose(compose(h, g), f));
    }
}

TEST_CASE("planned composition agrees with the literal recursion") {
  std::mt19937 rng(11);
  for (const auto& objs : {disk_objects(), plane_objects()})
    for (int trial = 0; trial < 400; ++trial) {
      CobObject a = objs[rng() % objs.size()], b = objs[rng() % objs.size()],
                c = objs[rng() % objs.size()];
      Morphism f = random_morphism(rng, a, b, 4);
      Morphism g = random_morphism(rng, b, c, 4);
      REQUIRE(compose(g, f).terms() == naive_compose(g, f));
    }
}

TEST_CASE("tensor products") {
  SUBCASE("identities glue to identities") {
    CHECK(tensor(Morphism::identity(obj(flat_o0())), Morphism::identity(obj(outer_o0()))) ==
          Morphism::identity(circle_obj(2)));
    CHECK(tensor(Morphism::identity(obj(flat_o0())), Morphism::identity(obj(outer_o1()))) ==
          Morphism::identity(circle_obj(1)));
    CHECK_THROWS_AS(make_flat(RegionKind::complement, kAllPoints, {2, 3, 0, 1}, 0), InputError);
  }
  SUBCASE("dots from both sides meet on one curve") {
    Morphism x = dot_endomorphism(obj(flat_o0()), 0);
    Morphism y = dot_endomorphism(obj(outer_o0()), 0);
    CHECK(tensor(x, y) == Morphism::identity(circle_obj(2)).times_t(1));
    Morphism z = dot_endomorphism(obj(outer_o0()), 1);
    Morphism id2 = Morphism::identity(circle_obj(2));
    CHECK(tensor(x, z) == dot_multiply_component(
                              dot_multiply_component(id2, {Component::Kind::circle, 0}),
                              {Component::Kind::circle, 1}));
  }
  SUBCASE("cups in disjoint regions") {
    FlatRef disk_circle = make_flat(RegionKind::disk, 0, {-1, -1, -1, -1}, 1);
    FlatRef disk_empty = make_flat(RegionKind::disk, 0, {-1, -1, -1, -1}, 0);
    Morphism cup1(obj(disk_empty), obj(disk_circle), {{1, 0}});
    Morphism cup2(obj(disk_empty), obj(disk_circle), {{0, 0}});
    Morphism both = tensor(cup1, cup2);
    CHECK(both.target().flat->num_circles() == 2);
    CHECK(both.terms() == TermSet{{0b01, 0}});
  }
  SUBCASE("tensor is functorial") {
    std::mt19937 rng(3);
    std::vector<CobObject> inner = {obj(flat_o0()), obj(flat_o1()), obj(disk_with_circle(true))};
    std::vector<CobObject> outer = {obj(outer_o0()), obj(outer_o1())};
    for (int trial = 0; trial < 200; ++trial) {
      CobObject a = inner[rng() % 3], b = inner[rng() % 3], c = inner[rng() % 3];
      CobObject p = outer[rng() % 2], q = outer[rng() % 2], r = outer[rng() % 2];
      Morphism f1 = random_morphism(rng, a, b), f2 = random_morphism(rng, b, c);
      Morphism g1 = random_morphism(rng, p, q), g2 = random_morphism(rng, q, r);
      REQUIRE(tensor(compose(f2, f1), compose(g2, g1)) ==
              compose(tensor(f2, g2), tensor(f1, g1)));
    }
  }
  CHECK_THROWS_AS(tensor(Morphism::identity(obj(flat_o0())), Morphism::identity(obj(flat_o0()))),
                  InputError);
}

TEST_CASE("degrees") {
  FlatRef arc = make_flat(RegionKind::disk, 0b0011, {1, 0, -1, -1}, 0);
  CHECK(degree(Morphism::identity(obj(arc))) == 0);
  CHECK(degree(saddle_o0_o1()) == -1);
  CHECK(degree(Morphism::identity(empty_obj()).times_t(1)) == -4);
  CHECK_THROWS_AS(degree(saddle_o0_o1() + dot_multiply(saddle_o0_o1(), 0)), VerificationError);
  CHECK(degree(Morphism(obj(flat_o0()), obj(flat_o1()))) == std::nullopt);
}

TEST_CASE("degree is additive") {
  std::mt19937 rng(5);
  auto objs = disk_objects();
  std::vector<CobObject> outer = {obj(outer_o0()), obj(outer_o1())};
  for (int trial = 0; trial < 300; ++trial) {
    CobObject a = objs[rng() % 4].shifted(rng() % 5), b = objs[rng() % 4].shifted(rng() % 5),
              c = objs[rng() % 4];
    Morphism f = random_term(rng, a, b), g = random_term(rng, b, c);
    Morphism gf = compose(g, f);
    if (!gf.is_zero()) REQUIRE(*degree(gf) == *degree(g) + *degree(f));
    Morphism o = random_term(rng, outer[rng() % 2], outer[rng() % 2]);
    Morphism fo = tensor(f, o);
    if (!fo.is_zero()) REQUIRE(*degree(fo) == *degree(f) + *degree(o));
    Morphism df = dot_derivative(f);
    if (!df.is_zero()) REQUIRE(*degree(df) == *degree(f) + 2);
    Morphism xf = dot_multiply(f, static_cast<int>(rng() % 4));
    if (!xf.is_zero()) REQUIRE(*degree(xf) == *degree(f) - 2);
  }
}

TEST_CASE("dot multiplication") {
  CobObject o0 = obj(flat_o0());
  Morphism xa = dot_endomorphism(o0, 0);
  const CurveSet& cs = xa.curves();
  CHECK(xa.terms() == TermSet{{uint64_t{1} << cs.point[0], 0}});
  CHECK(dot_multiply(xa, 0) == Morphism::identity(o0).times_t(1));
  CHECK(dot_multiply(saddle_o0_o1(), 0) == dot_multiply(saddle_o0_o1(), 2));
  FlatRef arc = make_flat(RegionKind::disk, 0b0011, {1, 0, -1, -1}, 0);
  CHECK_THROWS_AS(dot_multiply(Morphism::identity(obj(arc)), 2), InputError);

  std::mt19937 rng(13);
  auto objs = disk_objects();
  for (int trial = 0; trial < 200; ++trial) {
    CobObject a = objs[rng() % 4], b = objs[rng() % 4];
    Morphism s = random_morphism(rng, a, b);
    int p = static_cast<int>(rng() % 4);
    REQUIRE(dot_multiply(s, p) == compose(dot_endomorphism(b, p), s));
    REQUIRE(dot_multiply(s, p) == compose(s, dot_endomorphism(a, p)));
  }
}

TEST_CASE("dot derivative") {
  CobObject o0 = obj(flat_o0());
  Morphism xa = dot_endomorphism(o0, 0);
  Morphism xc = dot_endomorphism(o0, 2);
  CHECK(dot_derivative(xa) == Morphism::identity(o0));
  Morphism xaxc = compose(xa, xc);
  CHECK(dot_derivative(xaxc) == xa + xc);
  CHECK(dot_derivative(xaxc).terms().size() == 2);
  CHECK(dot_derivative(xaxc.times_t(1)) == dot_derivative(xaxc).times_t(1));
}

TEST_CASE("Leibniz rule and nilpotence on random pairs") {
  std::mt19937 rng(17);
  std::vector<CobObject> objs = disk_objects();
  std::vector<CobObject> outer = {obj(outer_o0()), obj(outer_o1())};
  for (int trial = 0; trial < 1000; ++trial) {
    CobObject a = objs[rng() % 4], b = objs[rng() % 4], c = objs[rng() % 4];
    Morphism f = random_morphism(rng, a, b), g = random_morphism(rng, b, c);
    REQUIRE(dot_derivative(compose(g, f)) ==
            compose(dot_derivative(g), f) + compose(g, dot_derivative(f)));
    REQUIRE(dot_derivative(dot_derivative(f)).is_zero());
    Morphism h = random_morphism(rng, outer[rng() % 2], outer[rng() % 2]);
    REQUIRE(dot_derivative(tensor(f, h)) ==
            tensor(dot_derivative(f), h) + tensor(f, dot_derivative(h)));
  }
}

TEST_CASE("square-zero morphisms commute with their derivative") {
  std::mt19937 rng(19);
  auto objs = disk_objects();
  int found = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    CobObject a = objs[rng() % 4];
    Morphism s = random_morphism(rng, a, a, 4);
    if (s.is_zero() || !compose(s, s).is_zero()) continue;
    ++found;
    REQUIRE(compose(s, dot_derivative(s)) == compose(dot_derivative(s), s));
  }
  CHECK(found > 0);
}

TEST_CASE("z rotation of cobordisms") {
  CobObject o0 = obj(flat_o0());
  CHECK(rotate_cob(dot_endomorphism(o0, 0)) == dot_endomorphism(o0, 2));
  CHECK(rotate_cob(saddle_o0_o1()) == saddle_o0_o1());
  std::mt19937 rng(23);
  auto objs = disk_objects();
  for (int trial = 0; trial < 200; ++trial) {
    CobObject a = objs[rng() % 4], b = objs[rng() % 4], c = objs[rng() % 4];
    Morphism f = random_morphism(rng, a, b), g = random_morphism(rng, b, c);
    REQUIRE(rotate_cob(rotate_cob(f)) == f);
    REQUIRE(rotate_cob(compose(g, f)) == compose(rotate_cob(g), rotate_cob(f)));
  }
}

TEST_CASE("time reversal") {
  std::mt19937 rng(29);
  auto objs = disk_objects();
  for (int trial = 0; trial < 200; ++trial) {
    CobObject a = objs[rng() % 4], b = objs[rng() % 4], c = objs[rng() % 4];
    Morphism f = random_morphism(rng, a, b), g = random_morphism(rng, b, c);
    REQUIRE(reversed(reversed(f)) == f);
    REQUIRE(reversed(compose(g, f)) == compose(reversed(f), reversed(g)));
  }
}
