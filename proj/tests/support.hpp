#pragma once

#include <string>
#include <vector>

#include "khmut/diagrams.hpp"

namespace khmut::test {

inline std::string fixture_path(const std::string& rel) {
  return std::string(KHMUT_FIXTURE_DIR) + "/" + rel;
}

inline TangleDiagram fixture(const std::string& rel) { return load_diagram(fixture_path(rel)); }

// Closed fixtures with at most 8 crossings.
inline const std::vector<std::string>& small_links() {
  static const std::vector<std::string> names = {
      "knots/unknot.json",    "knots/unlink2.json",   "knots/unknot_kink_pos.pd",
      "knots/unknot_kink_neg.pd", "knots/trefoil_left.pd", "knots/trefoil_left_4.pd",
      "knots/trefoil_left_5.pd", "knots/K3a1.pd",     "knots/K4a1.pd",
      "knots/K5a1.pd",        "knots/K5a2.pd",        "knots/K6a1.pd",
      "knots/K6a2.pd",        "knots/K6a3.pd",        "knots/K7a7.pd",
      "knots/K8a3.pd",        "knots/K8n1.pd",        "knots/K8n3.pd",
      "knots/L2a1.pd",        "knots/L4a1.pd",        "knots/L5a1.pd",
      "knots/L6a4.pd",        "knots/L6n1.pd",        "knots/L7n1.pd",
      "knots/L8n3.pd"};
  return names;
}

inline const std::vector<std::string>& disk_tangles() {
  static const std::vector<std::string> names = {"tangles/one_crossing_disk.json",
                                                 "tangles/clasp_disk.json",
                                                 "tangles/kt_inner.json"};
  return names;
}

inline const std::vector<std::string>& outer_tangles() {
  static const std::vector<std::string> names = {
      "tangles/one_crossing_outer.json", "tangles/horizontal_outer.json",
      "tangles/clasp_outer.json", "tangles/kt_outer.json"};
  return names;
}

}  // namespace khmut::test
