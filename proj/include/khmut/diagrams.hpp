#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace khmut {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a well-formed input violates a mathematical precondition.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OrientationConflict : public InputError {
 public:
  using InputError::InputError;
};

enum class RegionKind : uint8_t { disk, complement, plane };

// Boundary points a, b, c, d, in counterclockwise order on the unit circle.
inline constexpr int kNumPoints = 4;
using PointSet = uint8_t;  // bit p set iff point p is present
inline constexpr PointSet kAllPoints = 0b1111;

char point_name(int p);
int point_from_name(char ch);
std::string_view region_name(RegionKind kind);

struct Region {
  RegionKind kind = RegionKind::plane;
  PointSet points = 0;
  bool operator==(const Region&) const = default;
};

inline int popcount(uint64_t x) { return __builtin_popcountll(x); }

// A resolution assigns 0 or 1 to each crossing; bit c is the value at crossing c.
struct Resolution {
  uint64_t bits = 0;
  bool operator[](int c) const { return (bits >> c) & 1u; }
  int weight() const { return popcount(bits); }
  Resolution flipped(int c) const { return {bits ^ (uint64_t{1} << c)}; }
  bool operator==(const Resolution&) const = default;
};

struct EdgeEnd {
  int crossing = -1;  // -1 for a boundary point
  int slot = -1;
  int point = -1;
  bool on_boundary() const { return crossing < 0; }
  bool operator==(const EdgeEnd&) const = default;
};

// Crossing slots are listed counterclockwise starting at an under-strand end;
// slots s and s+2 belong to the same strand. For oriented diagrams slot 0 is
// the incoming under-strand.
using CrossingSlots = std::array<int, 4>;

class TangleDiagram {
 public:
  // head_at[e] is the end edge e points to; empty for an unoriented diagram.
  // Oriented crossings are normalized so that slot 0 is incoming.
  TangleDiagram(Region region, std::vector<CrossingSlots> crossings,
                std::array<int, kNumPoints> boundary_edge, int num_edges,
                std::vector<int> labels = {},
                std::vector<std::optional<EdgeEnd>> head_at = {});

  const Region& region() const { return region_; }
  int num_crossings() const { return static_cast<int>(crossings_.size()); }
  int num_edges() const { return static_cast<int>(ends_.size()); }
  const CrossingSlots& crossing(int c) const { return crossings_[c]; }
  const std::vector<CrossingSlots>& crossings() const { return crossings_; }
  int boundary_edge(int p) const { return boundary_edge_[p]; }
  std::span<const EdgeEnd> ends(int e) const { return ends_[e]; }
  bool is_free_loop(int e) const { return ends_[e].empty(); }
  int label(int e) const { return labels_[e]; }
  const std::vector<int>& labels() const { return labels_; }

  // Returns (edge, end index) attached to a crossing slot.
  std::pair<int, int> at_slot(int c, int s) const { return slot_end_[c][s]; }
  std::pair<int, int> at_point(int p) const;

  // Index into ends(e) of the head of edge e, or -1 when undirected.
  int head(int e) const { return heads_[e]; }
  std::vector<std::optional<EdgeEnd>> head_ends() const;
  bool is_directed(int e) const { return heads_[e] >= 0; }
  // Every edge touching a crossing is directed.
  bool is_oriented() const;
  bool is_closed() const { return region_.points == 0; }

 private:
  Region region_;
  std::vector<CrossingSlots> crossings_;
  std::array<int, kNumPoints> boundary_edge_{-1, -1, -1, -1};
  std::vector<std::vector<EdgeEnd>> ends_;
  std::vector<std::array<std::pair<int, int>, 4>> slot_end_;
  std::vector<int> labels_;
  std::vector<int8_t> heads_;
};

// A component of a crossingless tangle: arc index (arcs sorted by their first
// endpoint) or circle index.
struct Component {
  enum class Kind : uint8_t { arc, circle };
  Kind kind = Kind::arc;
  int index = 0;
  bool operator==(const Component&) const = default;
  auto operator<=>(const Component&) const = default;
};

class FlatTangle {
 public:
  // partner[p] = matched point of p, -1 when p is absent.
  FlatTangle(RegionKind region, PointSet points, std::array<int8_t, kNumPoints> partner,
             int num_circles, std::vector<Component> edge_component = {},
             std::map<std::string, Component> marks = {});

  // Packs region, matching and circle count; equal keys mean equal shapes.
  uint64_t shape_key() const;
  RegionKind region() const { return region_; }
  PointSet points() const { return points_; }
  int num_points() const { return popcount(points_); }
  int partner(int p) const { return partner_[p]; }
  const std::array<int8_t, kNumPoints>& partners() const { return partner_; }
  int num_arcs() const { return num_points() / 2; }
  int arc_of_point(int p) const { return arc_of_point_[p]; }
  // Endpoints (p < q) of an arc.
  std::pair<int, int> arc_endpoints(int arc) const;
  int num_circles() const { return num_circles_; }
  int num_components() const { return num_arcs() + num_circles_; }

  bool has_trace() const { return !edge_component_.empty(); }
  Component component_of_edge(int e) const { return edge_component_[e]; }
  std::optional<Component> mark(const std::string& name) const;
  const std::map<std::string, Component>& marks() const { return marks_; }

  // Same region, boundary matching and circle count.
  bool same_shape(const FlatTangle& other) const;

 private:
  RegionKind region_;
  PointSet points_;
  std::array<int8_t, kNumPoints> partner_;
  std::array<int8_t, kNumPoints> arc_of_point_{-1, -1, -1, -1};
  int num_circles_;
  std::vector<Component> edge_component_;
  std::map<std::string, Component> marks_;
};

using FlatRef = std::shared_ptr<const FlatTangle>;

// Canonical crossingless disk objects O_0 = {a-d, b-c} and O_1 = {a-b, c-d}.
FlatRef flat_o0();
FlatRef flat_o1();
FlatRef make_flat(RegionKind region, PointSet points, std::array<int8_t, kNumPoints> partner,
                  int num_circles);
FlatRef empty_flat();
FlatRef circles_flat(int n);

TangleDiagram parse_diagram(std::string_view text);
TangleDiagram load_diagram(const std::string& path);

int crossing_sign(const TangleDiagram& t, int c);
std::pair<int, int> crossing_signs(const TangleDiagram& t);

FlatRef resolve(const TangleDiagram& t, Resolution eps,
                const std::map<std::string, int>& marked_edges = {});

TangleDiagram rotate_z(const TangleDiagram& t);
TangleDiagram rotate_x(const TangleDiagram& t);
TangleDiagram rotate_y(const TangleDiagram& t);

// Reverses every directed edge.
TangleDiagram reverse(const TangleDiagram& t);
// Completes a partial orientation, choosing the first edge of each
// undirected component as pointing from its first end to its second.
TangleDiagram orient_default(const TangleDiagram& t);

enum class Connectivity { crossed, horizontal, vertical };
std::string_view connectivity_name(Connectivity c);
Connectivity connectivity(const TangleDiagram& t);

struct GlueResult {
  TangleDiagram diagram;
  // For each edge of the glued diagram, the pieces (0 = inner, 1 = outer, edge)
  // it was assembled from, with a flag marking pieces traversed against the
  // glued edge's first-to-second-end direction.
  struct Piece {
    int side;
    int edge;
    bool reversed;
  };
  std::vector<std::vector<Piece>> pieces;
};

GlueResult glue_with_provenance(const TangleDiagram& inner, const TangleDiagram& outer);
TangleDiagram glue(const TangleDiagram& inner, const TangleDiagram& outer);

// Orients an (inner, outer) pair so that the glued link is consistently
// oriented, keeping every direction already present.
std::pair<TangleDiagram, TangleDiagram> orient_pair(const TangleDiagram& inner,
                                                     const TangleDiagram& outer);

// Number of closed components, tracing strands straight through crossings.
int count_link_components(const TangleDiagram& t);

// Same region, boundary edges and crossings, each crossing compared up to the
// half turn of its slot list; orientations compared when both are oriented.
bool equivalent_diagrams(const TangleDiagram& x, const TangleDiagram& y);

std::string to_pd_string(const TangleDiagram& t);

}  // namespace khmut
