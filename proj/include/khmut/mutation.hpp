#pragma once

#include <optional>
#include <string>
#include <vector>

#include "khmut/bracket.hpp"
#include "khmut/homology.hpp"

namespace khmut {

// The strand of a crossed outer tangle running from a to c, followed straight
// through every crossing. With k counted from 1, crossing c_k sits between
// edges e_k and e_{k+1}; e_1 starts at a and e_{m+1} ends at c. Marks p_k lie
// on e_k.
struct ArcTraversal {
  std::vector<int> edges;      // e_1 .. e_{m+1}
  std::vector<int> crossings;  // c_1 .. c_m
  // Pairs (k, l), k < l, with c_k == c_l.
  std::vector<std::pair<int, int>> self_pairs;

  int m() const { return static_cast<int>(crossings.size()); }
  bool is_self_crossing(int k) const;
  static std::string mark_name(int k) { return "p" + std::to_string(k); }
  std::map<std::string, int> marked_edges() const;
};

ArcTraversal trace_arc(const TangleDiagram& outer);

// R_dot(S) = S + (x_a + x_c) d_dot(S) for a morphism between O_0 / O_1 objects.
Morphism dot_rotate(const Morphism& s);
Complex dot_rotation(const Complex& c);

// X_1 .. X_{m+1}: the dot on the component through p_k, on every resolution.
// The bracket must be built with the traversal's marked edges.
std::vector<GradedMap> dot_multiplication_endos(const Bracket& outer, const ArcTraversal& arc);
// X_p for a boundary point p, on every object of the bracket.
GradedMap point_dot_map(const Bracket& b, int point);
// h_k: reversed saddles of c_k, homological degree -1, quantum degree -2.
GradedMap migration_homotopy(const Bracket& outer, const ArcTraversal& arc, int k);

// Orients (inner, outer) consistently, reversing the inner tangle if needed.
std::pair<TangleDiagram, TangleDiagram> orient_mutation_pair(const TangleDiagram& inner,
                                                             const TangleDiagram& outer);
// (R_z(inner), outer), oriented with the same fix.
std::pair<TangleDiagram, TangleDiagram> mutate_pair(const TangleDiagram& inner,
                                                    const TangleDiagram& outer);
TangleDiagram mutate_diagram(const TangleDiagram& inner, const TangleDiagram& outer);

struct PhiOptions {
  // Drops both factors of every self-crossing pair; they cancel.
  bool skip_self_crossings = false;
  int jobs = 0;
};

struct PhiData {
  Bracket inner, outer;
  ArcTraversal arc;
  Complex straight;   // D'(Kh(T)), differential delta
  GradedMap dot_delta;  // d_dot(delta)
  TensorLayout layout;
  Complex a, b;
  std::vector<GradedMap> homotopies;  // h_1 .. h_m
  std::vector<int> order;             // k of each factor of phi, left to right
  GradedMap phi;
};

// Requires a four-ended disk tangle and a crossed four-ended outer tangle,
// consistently oriented.
PhiData build_phi(const TangleDiagram& inner, const TangleDiagram& outer,
                  const PhiOptions& options = {});

struct StageResult {
  std::string name;
  bool passed = false;
  std::optional<EntryLocation> counterexample;
};

struct MutationCertificate {
  std::vector<StageResult> stages;
  ArcTraversal arc;
  std::vector<int> order;
  size_t objects = 0;
  int components_before = 0, components_after = 0;
  HomologyTable kh_before, kh_after, lee_before, lee_after;

  bool valid() const;
  // Name of the first failing stage, empty when valid.
  std::string failed_stage() const;
  std::string to_json() const;
};

MutationCertificate verify_mutation(const TangleDiagram& inner, const TangleDiagram& outer,
                                    const PhiOptions& options = {});

}  // namespace khmut
