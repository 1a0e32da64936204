#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "khmut/matcat.hpp"

namespace khmut {

// The undotted saddle from resolve(t, eps) to resolve(t, eps with c set to 1).
// Resolved flats with traces may be supplied to avoid recomputation.
Morphism saddle(const TangleDiagram& t, Resolution eps, int c, FlatRef source = nullptr,
                FlatRef target = nullptr);

struct BracketOptions {
  // (n_plus, n_minus) used instead of the diagram's signs.
  std::optional<std::pair<int, int>> signs;
  // Named edges whose components are recorded in every resolution.
  std::map<std::string, int> marked_edges;
  int jobs = 0;
};

struct Bracket {
  TangleDiagram diagram;
  Complex complex;
  int n_plus = 0;
  int n_minus = 0;
  // states[k][j] is the resolution of object j in degree low + k.
  std::vector<std::vector<uint64_t>> states;
  std::unordered_map<uint64_t, std::pair<int, int>> position;  // state -> (degree, index)

  int low() const { return complex.objects.low; }
  const CobObject& object_of(Resolution eps) const;
};

// Objects of degree i are the resolutions of weight i + n_minus, ordered by
// bitmask, each shifted by its weight + n_plus - 2 n_minus.
Bracket khovanov_bracket(const TangleDiagram& t, const BracketOptions& options = {});

// The summand d_c of the differential made of the saddles at crossing c.
GradedMap crossing_differential(const Bracket& b, int c);

}  // namespace khmut
