#include "khmut/diagrams.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "khmut/union_find.hpp"
#include "json.hpp"

namespace khmut {

using nlohmann::json;

char point_name(int p) { return static_cast<char>('a' + p); }

int point_from_name(char ch) {
  if (ch < 'a' || ch > 'd') throw InputError(std::string("unknown boundary point '") + ch + "'");
  return ch - 'a';
}

std::string_view region_name(RegionKind kind) {
  switch (kind) {
    case RegionKind::disk: return "disk";
    case RegionKind::complement: return "complement";
    case RegionKind::plane: return "plane";
  }
  return "?";
}

// ---------------------------------------------------------------- diagram

TangleDiagram::TangleDiagram(Region region, std::vector<CrossingSlots> crossings,
                             std::array<int, kNumPoints> boundary_edge, int num_edges,
                             std::vector<int> labels, std::vector<std::optional<EdgeEnd>> head_at)
    : region_(region), crossings_(std::move(crossings)), boundary_edge_(boundary_edge),
      labels_(std::move(labels)) {
  if (region_.kind == RegionKind::plane && region_.points != 0)
    throw InputError("plane region cannot have boundary points");
  if (labels_.empty()) {
    labels_.resize(num_edges);
    std::iota(labels_.begin(), labels_.end(), 1);
  }
  if (static_cast<int>(labels_.size()) != num_edges) throw InputError("label count mismatch");
  if (!head_at.empty() && static_cast<int>(head_at.size()) != num_edges)
    throw InputError("orientation size mismatch");

  auto check_edge = [&](int e) {
    if (e < 0 || e >= num_edges) throw InputError("edge index out of range");
  };
  ends_.assign(num_edges, {});
  for (int c = 0; c < num_crossings(); ++c)
    for (int s = 0; s < 4; ++s) {
      check_edge(crossings_[c][s]);
      ends_[crossings_[c][s]].push_back({c, s, -1});
    }
  for (int p = 0; p < kNumPoints; ++p) {
    bool present = (region_.points >> p) & 1u;
    if (present != (boundary_edge_[p] >= 0))
      throw InputError(std::string("boundary point ") + point_name(p) +
                       (present ? " has no edge" : " is not in the region"));
    if (present) {
      check_edge(boundary_edge_[p]);
      ends_[boundary_edge_[p]].push_back({-1, -1, p});
    }
  }
  for (int e = 0; e < num_edges; ++e) {
    if (ends_[e].size() == 1) throw InputError("dangling edge " + std::to_string(labels_[e]));
    if (ends_[e].size() > 2)
      throw InputError("edge " + std::to_string(labels_[e]) + " has more than two endpoints");
  }

  heads_.assign(num_edges, -1);
  for (int e = 0; e < static_cast<int>(head_at.size()); ++e) {
    if (!head_at[e] || ends_[e].empty()) continue;
    auto it = std::find(ends_[e].begin(), ends_[e].end(), *head_at[e]);
    if (it == ends_[e].end()) throw InputError("orientation names a non-existent edge end");
    heads_[e] = static_cast<int8_t>(it - ends_[e].begin());
  }

  slot_end_.assign(num_crossings(), {});
  auto rebuild_slots = [&] {
    for (int e = 0; e < num_edges; ++e)
      for (int i = 0; i < static_cast<int>(ends_[e].size()); ++i)
        if (!ends_[e][i].on_boundary()) slot_end_[ends_[e][i].crossing][ends_[e][i].slot] = {e, i};
  };
  rebuild_slots();

  auto incoming = [&](int c, int s) {
    auto [e, i] = slot_end_[c][s];
    return heads_[e] == i;
  };
  bool normalized = false;
  for (int c = 0; c < num_crossings(); ++c) {
    for (int s = 0; s < 2; ++s) {
      auto [e1, i1] = slot_end_[c][s];
      auto [e2, i2] = slot_end_[c][s + 2];
      if (heads_[e1] < 0 || heads_[e2] < 0) continue;
      if (incoming(c, s) == incoming(c, s + 2))
        throw OrientationConflict("inconsistent orientation at crossing " + std::to_string(c + 1));
    }
    auto [e0, i0] = slot_end_[c][0];
    if (heads_[e0] >= 0 && !incoming(c, 0)) {
      auto& x = crossings_[c];
      x = {x[2], x[3], x[0], x[1]};
      for (int s = 0; s < 4; ++s) {
        auto [e, i] = slot_end_[c][s];
        ends_[e][i].slot = (s + 2) % 4;
      }
      normalized = true;
    }
  }
  if (normalized) rebuild_slots();
}

std::pair<int, int> TangleDiagram::at_point(int p) const {
  int e = boundary_edge_[p];
  if (e < 0) throw InputError(std::string("boundary point ") + point_name(p) + " absent");
  for (int i = 0; i < static_cast<int>(ends_[e].size()); ++i)
    if (ends_[e][i].point == p) return {e, i};
  throw InputError("corrupt boundary table");
}

std::vector<std::optional<EdgeEnd>> TangleDiagram::head_ends() const {
  std::vector<std::optional<EdgeEnd>> out(num_edges());
  for (int e = 0; e < num_edges(); ++e)
    if (heads_[e] >= 0) out[e] = ends_[e][heads_[e]];
  return out;
}

bool TangleDiagram::is_oriented() const {
  for (int e = 0; e < num_edges(); ++e) {
    bool touches = std::any_of(ends_[e].begin(), ends_[e].end(),
                               [](const EdgeEnd& x) { return !x.on_boundary(); });
    if (touches && heads_[e] < 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------- flat

FlatTangle::FlatTangle(RegionKind region, PointSet points, std::array<int8_t, kNumPoints> partner,
                       int num_circles, std::vector<Component> edge_component,
                       std::map<std::string, Component> marks)
    : region_(region), points_(points), partner_(partner),
      num_circles_(num_circles), edge_component_(std::move(edge_component)),
      marks_(std::move(marks)) {
  int arc = 0;
  for (int p = 0; p < kNumPoints; ++p) {
    bool present = (points_ >> p) & 1u;
    int q = partner_[p];
    if (!present) {
      if (q != -1) throw InputError("partner set for an absent point");
      continue;
    }
    if (q < 0 || q >= kNumPoints || q == p || !((points_ >> q) & 1u) || partner_[q] != p)
      throw InputError("boundary matching is not a perfect matching");
    if (q > p) {
      arc_of_point_[p] = static_cast<int8_t>(arc);
      arc_of_point_[q] = static_cast<int8_t>(arc);
      ++arc;
    }
  }
  if (points_ == kAllPoints && partner_[0] == 2)
    throw InputError("matching a-c, b-d is not planar");
  for (auto& [name, comp] : marks_) {
    int bound = comp.kind == Component::Kind::arc ? num_arcs() : num_circles_;
    if (comp.index < 0 || comp.index >= bound) throw InputError("mark " + name + " out of range");
  }
}

uint64_t FlatTangle::shape_key() const {
  uint64_t key = static_cast<uint64_t>(region_);
  for (int p = 0; p < kNumPoints; ++p) key = (key << 3) | static_cast<uint64_t>(partner_[p] + 1);
  return (key << 32) | static_cast<uint32_t>(num_circles_);
}

std::pair<int, int> FlatTangle::arc_endpoints(int arc) const {
  for (int p = 0; p < kNumPoints; ++p)
    if (arc_of_point_[p] == arc) return {p, partner_[p]};
  throw std::out_of_range("arc index");
}

std::optional<Component> FlatTangle::mark(const std::string& name) const {
  auto it = marks_.find(name);
  if (it == marks_.end()) return std::nullopt;
  return it->second;
}

bool FlatTangle::same_shape(const FlatTangle& o) const {
  return region_ == o.region_ && points_ == o.points_ && partner_ == o.partner_ &&
         num_circles_ == o.num_circles_;
}

FlatRef make_flat(RegionKind region, PointSet points, std::array<int8_t, kNumPoints> partner,
                  int num_circles) {
  return std::make_shared<const FlatTangle>(region, points, partner, num_circles);
}

FlatRef flat_o0() {
  static const FlatRef o0 = make_flat(RegionKind::disk, kAllPoints, {3, 2, 1, 0}, 0);
  return o0;
}

FlatRef flat_o1() {
  static const FlatRef o1 = make_flat(RegionKind::disk, kAllPoints, {1, 0, 3, 2}, 0);
  return o1;
}

FlatRef empty_flat() {
  static const FlatRef e = make_flat(RegionKind::plane, 0, {-1, -1, -1, -1}, 0);
  return e;
}

FlatRef circles_flat(int n) { return make_flat(RegionKind::plane, 0, {-1, -1, -1, -1}, n); }

// ---------------------------------------------------------------- orientation

namespace {

using Heads = std::vector<std::optional<EdgeEnd>>;

EdgeEnd other_end(const TangleDiagram& t, int e, const EdgeEnd& x) {
  auto ends = t.ends(e);
  if (ends.size() != 2) throw InputError("edge without two ends");
  // An edge may have both ends at one crossing; compare full end records.
  return ends[0] == x ? ends[1] : ends[0];
}

// Pushes directions straight through crossings until nothing changes.
void propagate(const TangleDiagram& t, Heads& heads, std::vector<int> queue) {
  auto set_head = [&](int e, const EdgeEnd& h) {
    if (heads[e]) {
      if (!(*heads[e] == h))
        throw OrientationConflict("inconsistent orientation on edge " + std::to_string(t.label(e)));
      return false;
    }
    heads[e] = h;
    return true;
  };
  while (!queue.empty()) {
    int e = queue.back();
    queue.pop_back();
    EdgeEnd h = *heads[e];
    EdgeEnd tail = other_end(t, e, h);
    if (!h.on_boundary()) {
      auto [e2, i2] = t.at_slot(h.crossing, (h.slot + 2) % 4);
      EdgeEnd leave = t.ends(e2)[i2];
      if (set_head(e2, other_end(t, e2, leave))) queue.push_back(e2);
    }
    if (!tail.on_boundary()) {
      auto [e2, i2] = t.at_slot(tail.crossing, (tail.slot + 2) % 4);
      if (set_head(e2, t.ends(e2)[i2])) queue.push_back(e2);
    }
  }
}

TangleDiagram with_heads(const TangleDiagram& t, Heads heads) {
  return TangleDiagram(t.region(), t.crossings(),
                       {t.boundary_edge(0), t.boundary_edge(1), t.boundary_edge(2),
                        t.boundary_edge(3)},
                       t.num_edges(), t.labels(), std::move(heads));
}

// Slot 0 incoming everywhere; over strands left undirected by propagation
// follow increasing labels (with wrap-around at the largest label).
Heads pd_orientation(const TangleDiagram& t) {
  Heads heads(t.num_edges());
  std::vector<int> queue;
  for (int c = 0; c < t.num_crossings(); ++c) {
    auto [e, i] = t.at_slot(c, 0);
    EdgeEnd h = t.ends(e)[i];
    if (heads[e] && !(*heads[e] == h))
      throw OrientationConflict("slot 0 of two crossings on one edge cannot both be incoming");
    if (!heads[e]) {
      heads[e] = h;
      queue.push_back(e);
    }
  }
  propagate(t, heads, queue);
  for (int c = 0; c < t.num_crossings(); ++c) {
    auto [ej, ij] = t.at_slot(c, 1);
    auto [el, il] = t.at_slot(c, 3);
    if (heads[ej] || heads[el]) continue;
    int j = t.label(ej), l = t.label(el);
    bool j_to_l = (l == j + 1) || (j != l + 1 && j > l);
    // j_to_l: strand enters at slot 1.
    if (j_to_l) {
      heads[ej] = t.ends(ej)[ij];
      propagate(t, heads, {ej});
    } else {
      heads[el] = t.ends(el)[il];
      propagate(t, heads, {el});
    }
  }
  return heads;
}

struct StrandSpec {
  int start_point = -1;
  int end_point = -1;
  std::vector<int> labels;
};

Heads strand_orientation(const TangleDiagram& t, const std::vector<StrandSpec>& strands) {
  std::map<int, int> edge_of_label;
  for (int e = 0; e < t.num_edges(); ++e) edge_of_label[t.label(e)] = e;
  auto edge = [&](int label) {
    auto it = edge_of_label.find(label);
    if (it == edge_of_label.end())
      throw InputError("orientation names unknown edge " + std::to_string(label));
    return it->second;
  };
  Heads heads(t.num_edges());
  std::vector<int> queue;
  auto assign = [&](int e, const EdgeEnd& h) {
    if (heads[e] && !(*heads[e] == h))
      throw OrientationConflict("inconsistent orientation on edge " + std::to_string(t.label(e)));
    if (!heads[e]) {
      heads[e] = h;
      queue.push_back(e);
    }
  };
  auto point_end = [&](int e, int p) -> EdgeEnd {
    for (const EdgeEnd& x : t.ends(e))
      if (x.point == p) return x;
    throw InputError(std::string("edge does not end at point ") + point_name(p));
  };
  for (const auto& s : strands) {
    if (s.labels.empty()) throw InputError("empty orientation strand");
    if (s.labels.size() == 1 && s.start_point < 0 && s.end_point < 0)
      throw InputError("single-edge strand needs a boundary letter");
    for (size_t k = 0; k + 1 < s.labels.size(); ++k) {
      int e1 = edge(s.labels[k]), e2 = edge(s.labels[k + 1]);
      std::optional<EdgeEnd> join;
      for (const EdgeEnd& x : t.ends(e1)) {
        if (x.on_boundary()) continue;
        auto [f, i] = t.at_slot(x.crossing, (x.slot + 2) % 4);
        if (f == e2) join = x;
      }
      if (!join)
        throw InputError("orientation edges " + std::to_string(s.labels[k]) + " and " +
                         std::to_string(s.labels[k + 1]) + " are not consecutive");
      assign(e1, *join);
    }
    if (s.start_point >= 0) {
      int e = edge(s.labels.front());
      assign(e, other_end(t, e, point_end(e, s.start_point)));
    }
    if (s.end_point >= 0) {
      int e = edge(s.labels.back());
      assign(e, point_end(e, s.end_point));
    }
    if (s.labels.size() >= 2 && s.end_point < 0) {
      // Last edge continues the strand away from the previous crossing.
      int e1 = edge(s.labels[s.labels.size() - 2]);
      int e2 = edge(s.labels.back());
      EdgeEnd h = *heads[e1];
      auto [f, i] = t.at_slot(h.crossing, (h.slot + 2) % 4);
      (void)f;
      assign(e2, other_end(t, e2, t.ends(e2)[i]));
    }
  }
  propagate(t, heads, queue);
  return heads;
}

}  // namespace

TangleDiagram reverse(const TangleDiagram& t) {
  Heads heads(t.num_edges());
  for (int e = 0; e < t.num_edges(); ++e)
    if (t.head(e) >= 0) heads[e] = t.ends(e)[1 - t.head(e)];
  return with_heads(t, std::move(heads));
}

TangleDiagram orient_default(const TangleDiagram& t) {
  Heads heads = t.head_ends();
  std::vector<int> queue;
  for (int e = 0; e < t.num_edges(); ++e)
    if (heads[e]) queue.push_back(e);
  propagate(t, heads, queue);
  for (int e = 0; e < t.num_edges(); ++e) {
    if (heads[e] || t.ends(e).size() != 2) continue;
    heads[e] = t.ends(e)[1];
    propagate(t, heads, {e});
  }
  return with_heads(t, std::move(heads));
}

// ---------------------------------------------------------------- parsing

namespace {

struct RawDiagram {
  RegionKind kind = RegionKind::plane;
  std::map<int, int> boundary;  // point -> label
  std::vector<std::array<int, 4>> crossings;
  int declared_edges = 0;
  int free_loops = 0;
  std::optional<json> orientation;
  bool pd_orientation = false;
};

TangleDiagram build(const RawDiagram& raw) {
  std::map<int, int> uses;
  for (const auto& x : raw.crossings)
    for (int l : x) ++uses[l];
  for (auto [p, l] : raw.boundary) ++uses[l];
  for (auto [l, n] : uses) {
    if (l <= 0) throw InputError("edge labels must be positive");
    if (n == 1) throw InputError("dangling edge " + std::to_string(l));
    if (n > 2) throw InputError("edge " + std::to_string(l) + " has more than two endpoints");
  }
  std::vector<int> labels;
  for (auto [l, n] : uses) labels.push_back(l);
  if (raw.declared_edges > 0) {
    if (!labels.empty() && labels.back() > raw.declared_edges)
      throw InputError("edge label exceeds declared edge count");
    for (int l = 1; l <= raw.declared_edges; ++l)
      if (!uses.count(l)) labels.push_back(l);
    std::sort(labels.begin(), labels.end());
  }
  int next = labels.empty() ? 1 : labels.back() + 1;
  for (int k = 0; k < raw.free_loops; ++k) labels.push_back(next++);
  std::map<int, int> index;
  for (int e = 0; e < static_cast<int>(labels.size()); ++e) index[labels[e]] = e;

  Region region{raw.kind, 0};
  std::array<int, kNumPoints> bedge{-1, -1, -1, -1};
  for (auto [p, l] : raw.boundary) {
    region.points |= static_cast<PointSet>(1u << p);
    bedge[p] = index.at(l);
  }
  if (raw.kind != RegionKind::plane && popcount(region.points) % 2 != 0)
    throw InputError("odd number of boundary points");
  if (raw.kind == RegionKind::plane && !raw.boundary.empty())
    throw InputError("plane region cannot have boundary points");
  std::vector<CrossingSlots> xs;
  for (const auto& x : raw.crossings)
    xs.push_back({index.at(x[0]), index.at(x[1]), index.at(x[2]), index.at(x[3])});
  TangleDiagram plain(region, xs, bedge, static_cast<int>(labels.size()), labels);

  if (raw.pd_orientation) return with_heads(plain, pd_orientation(plain));
  if (!raw.orientation) return plain;
  std::vector<StrandSpec> strands;
  for (const auto& item : *raw.orientation) {
    if (!item.is_array()) throw InputError("orientation strands must be arrays");
    StrandSpec s;
    for (size_t k = 0; k < item.size(); ++k) {
      const auto& v = item[k];
      if (v.is_string()) {
        std::string name = v.get<std::string>();
        if (name.size() != 1) throw InputError("bad boundary letter in orientation");
        if (k == 0) s.start_point = point_from_name(name[0]);
        else if (k + 1 == item.size()) s.end_point = point_from_name(name[0]);
        else throw InputError("boundary letter inside an orientation strand");
      } else if (v.is_number_integer()) {
        s.labels.push_back(v.get<int>());
      } else {
        throw InputError("bad orientation entry");
      }
    }
    strands.push_back(std::move(s));
  }
  return with_heads(plain, strand_orientation(plain, strands));
}

RegionKind parse_region(const std::string& s) {
  if (s == "disk") return RegionKind::disk;
  if (s == "complement" || s == "disk-complement") return RegionKind::complement;
  if (s == "plane") return RegionKind::plane;
  throw InputError("unknown region '" + s + "'");
}

int as_label(const json& v) {
  if (!v.is_number_integer()) throw InputError("edge labels must be integers");
  return v.get<int>();
}

TangleDiagram parse_json_diagram(std::string_view text) {
  // Track keys per object so repeated keys are rejected instead of overwritten.
  std::vector<std::pair<std::string, std::set<std::string>>> stack;
  std::string last_key;
  json::parser_callback_t cb = [&](int, json::parse_event_t ev, json& parsed) {
    switch (ev) {
      case json::parse_event_t::object_start:
        stack.push_back({last_key, {}});
        break;
      case json::parse_event_t::object_end:
        stack.pop_back();
        break;
      case json::parse_event_t::key: {
        std::string k = parsed.get<std::string>();
        if (!stack.empty() && !stack.back().second.insert(k).second) {
          if (stack.back().first == "boundary") throw InputError("boundary point reused: " + k);
          throw InputError("duplicate key '" + k + "'");
        }
        last_key = k;
        break;
      }
      default:
        break;
    }
    return true;
  };
  json j;
  try {
    j = json::parse(text.begin(), text.end(), cb);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("diagram JSON must be an object");
  RawDiagram raw;
  try {
    raw.kind = parse_region(j.value("region", std::string("plane")));
    if (j.contains("boundary")) {
      const auto& b = j["boundary"];
      auto put = [&](int p, int label) {
        if (!raw.boundary.emplace(p, label).second)
          throw InputError(std::string("boundary point reused: ") + point_name(p));
      };
      if (b.is_object()) {
        for (auto it = b.begin(); it != b.end(); ++it) {
          if (it.key().size() != 1) throw InputError("bad boundary point '" + it.key() + "'");
          put(point_from_name(it.key()[0]), as_label(it.value()));
        }
      } else if (b.is_array() && !b.empty() && b[0].is_array()) {
        for (const auto& pr : b) {
          if (pr.size() != 2 || !pr[0].is_string()) throw InputError("bad boundary pair");
          std::string n = pr[0].get<std::string>();
          if (n.size() != 1) throw InputError("bad boundary point '" + n + "'");
          put(point_from_name(n[0]), as_label(pr[1]));
        }
      } else if (b.is_array()) {
        if (b.size() != 4) throw InputError("boundary array must list edges at a, b, c, d");
        for (int p = 0; p < 4; ++p)
          if (!b[p].is_null()) put(p, as_label(b[p]));
      } else {
        throw InputError("bad boundary specification");
      }
    }
    if (j.contains("crossings")) {
      for (const auto& x : j["crossings"]) {
        if (!x.is_array() || x.size() != 4)
          throw InputError("each crossing needs exactly 4 slot references");
        raw.crossings.push_back({as_label(x[0]), as_label(x[1]), as_label(x[2]), as_label(x[3])});
      }
    }
    if (j.contains("edges")) {
      if (!j["edges"].is_number_integer() || j["edges"].get<int>() < 0)
        throw InputError("edges must be a non-negative integer");
      raw.declared_edges = j["edges"].get<int>();
    }
    if (j.contains("orientation")) {
      const auto& o = j["orientation"];
      if (o.is_string()) {
        if (o.get<std::string>() != "pd") throw InputError("unknown orientation convention");
        raw.pd_orientation = true;
      } else if (o.is_array()) {
        raw.orientation = o;
      } else if (!o.is_null()) {
        throw InputError("bad orientation specification");
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed diagram: ") + e.what());
  }
  if (raw.kind != RegionKind::plane && raw.boundary.empty() && raw.crossings.empty() &&
      raw.declared_edges == 0)
    throw InputError("empty tangle");
  return build(raw);
}

TangleDiagram parse_pd(std::string_view text) {
  std::string s;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    s.push_back(text[i]);
  }
  RawDiagram raw;
  raw.pd_orientation = true;
  size_t i = 0;
  auto skip = [&] {
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
  };
  skip();
  if (s.compare(i, 3, "PD[") == 0 || s.compare(i, 3, "PD(") == 0) {
    i += 3;
    size_t close = s.find_last_of("])");
    if (close == std::string::npos || close < i) throw InputError("unterminated PD[...]");
    s.erase(close);
  }
  while (true) {
    skip();
    if (i >= s.size()) break;
    char ch = s[i];
    if (ch == 'O') {
      ++raw.free_loops;
      ++i;
      if (i + 1 < s.size() && (s[i] == '(' || s[i] == '[') && (s[i + 1] == ')' || s[i + 1] == ']'))
        i += 2;
      continue;
    }
    if (ch != 'X') throw InputError(std::string("unexpected character '") + ch + "' in PD code");
    ++i;
    if (i >= s.size() || (s[i] != '(' && s[i] != '['))
      throw InputError("expected '(' after X in PD code");
    char close = s[i] == '(' ? ')' : ']';
    ++i;
    std::array<int, 4> x{};
    for (int k = 0; k < 4; ++k) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      size_t used = 0;
      try {
        x[k] = std::stoi(s.substr(i), &used);
      } catch (const std::exception&) {
        throw InputError("expected an integer in PD code");
      }
      i += used;
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (k < 3) {
        if (i >= s.size() || s[i] != ',')
          throw InputError("each crossing needs exactly 4 slot references");
        ++i;
      }
    }
    if (i >= s.size() || s[i] != close)
      throw InputError("each crossing needs exactly 4 slot references");
    ++i;
    raw.crossings.push_back(x);
  }
  if (raw.crossings.empty() && raw.free_loops == 0) throw InputError("empty PD code");
  return build(raw);
}

}  // namespace

TangleDiagram parse_diagram(std::string_view text) {
  size_t k = 0;
  while (k < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[k]))) {
      ++k;
    } else if (text[k] == '#') {
      while (k < text.size() && text[k] != '\n') ++k;
    } else {
      break;
    }
  }
  if (k < text.size() && text[k] == '{') return parse_json_diagram(text);
  return parse_pd(text);
}

TangleDiagram load_diagram(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_diagram(ss.str());
}

// ---------------------------------------------------------------- signs

int crossing_sign(const TangleDiagram& t, int c) {
  auto incoming = [&](int s) {
    auto [e, i] = t.at_slot(c, s);
    if (t.head(e) < 0) throw InputError("crossing sign needs an oriented diagram");
    return t.head(e) == i;
  };
  int under_in = incoming(0) ? 0 : 2;
  int over_in = incoming(1) ? 1 : 3;
  if (incoming(under_in == 0 ? 2 : 0) || incoming(over_in == 1 ? 3 : 1))
    throw OrientationConflict("inconsistent orientation at crossing " + std::to_string(c + 1));
  bool positive = (under_in == 0 && over_in == 3) || (under_in == 2 && over_in == 1);
  return positive ? 1 : -1;
}

std::pair<int, int> crossing_signs(const TangleDiagram& t) {
  if (!t.is_oriented()) throw InputError("crossing signs need an oriented diagram");
  int plus = 0, minus = 0;
  for (int c = 0; c < t.num_crossings(); ++c) (crossing_sign(t, c) > 0 ? plus : minus)++;
  return {plus, minus};
}

// ---------------------------------------------------------------- resolve

FlatRef resolve(const TangleDiagram& t, Resolution eps,
                const std::map<std::string, int>& marked_edges) {
  UnionFind uf(t.num_edges());
  for (int c = 0; c < t.num_crossings(); ++c) {
    const auto& x = t.crossing(c);
    if (!eps[c]) {
      uf.unite(x[0], x[1]);
      uf.unite(x[2], x[3]);
    } else {
      uf.unite(x[1], x[2]);
      uf.unite(x[3], x[0]);
    }
  }
  std::array<int8_t, kNumPoints> partner{-1, -1, -1, -1};
  std::vector<int> root_point(t.num_edges(), -1);
  for (int p = 0; p < kNumPoints; ++p) {
    if (!((t.region().points >> p) & 1u)) continue;
    int r = uf.find(t.boundary_edge(p));
    if (root_point[r] < 0) {
      root_point[r] = p;
    } else {
      partner[p] = static_cast<int8_t>(root_point[r]);
      partner[root_point[r]] = static_cast<int8_t>(p);
    }
  }
  // Arc index of the smaller endpoint order; circles by smallest edge.
  std::array<int, kNumPoints> arc_index{-1, -1, -1, -1};
  int arcs = 0;
  for (int p = 0; p < kNumPoints; ++p)
    if (partner[p] > p) arc_index[p] = arc_index[partner[p]] = arcs++;
  std::vector<Component> comp(t.num_edges());
  std::vector<int> circle_of_root(t.num_edges(), -1);
  int circles = 0;
  for (int e = 0; e < t.num_edges(); ++e) {
    int r = uf.find(e);
    if (root_point[r] >= 0) {
      comp[e] = {Component::Kind::arc, arc_index[root_point[r]]};
    } else {
      if (circle_of_root[r] < 0) circle_of_root[r] = circles++;
      comp[e] = {Component::Kind::circle, circle_of_root[r]};
    }
  }
  std::map<std::string, Component> marks;
  for (const auto& [name, e] : marked_edges) marks[name] = comp.at(e);
  return std::make_shared<const FlatTangle>(t.region().kind, t.region().points, partner, circles,
                                            std::move(comp), std::move(marks));
}

// ---------------------------------------------------------------- rotations

namespace {

TangleDiagram permute(const TangleDiagram& t, const std::array<int, 4>& point_map,
                      bool mirror_crossings) {
  if (t.region().kind != RegionKind::disk) throw InputError("rotation needs a disk tangle");
  if (t.region().points != kAllPoints) throw InputError("rotation needs boundary {a,b,c,d}");
  std::array<int, kNumPoints> bedge{};
  for (int p = 0; p < kNumPoints; ++p) bedge[point_map[p]] = t.boundary_edge(p);
  std::vector<CrossingSlots> xs = t.crossings();
  if (mirror_crossings)
    for (auto& x : xs) x = {x[3], x[2], x[1], x[0]};
  Heads heads = t.head_ends();
  for (auto& h : heads) {
    if (!h) continue;
    if (h->on_boundary()) h->point = point_map[h->point];
    else if (mirror_crossings) h->slot = 3 - h->slot;
  }
  return TangleDiagram(t.region(), xs, bedge, t.num_edges(), t.labels(), std::move(heads));
}

}  // namespace

TangleDiagram rotate_z(const TangleDiagram& t) { return permute(t, {2, 3, 0, 1}, false); }
TangleDiagram rotate_x(const TangleDiagram& t) { return permute(t, {3, 2, 1, 0}, true); }
TangleDiagram rotate_y(const TangleDiagram& t) { return permute(t, {1, 0, 3, 2}, true); }

// ---------------------------------------------------------------- connectivity

std::string_view connectivity_name(Connectivity c) {
  switch (c) {
    case Connectivity::crossed: return "crossed";
    case Connectivity::horizontal: return "horizontal";
    case Connectivity::vertical: return "vertical";
  }
  return "?";
}

namespace {

int trace_to_point(const TangleDiagram& t, int p) {
  auto [e, i] = t.at_point(p);
  for (int steps = 0; steps <= t.num_edges(); ++steps) {
    const EdgeEnd& x = t.ends(e)[1 - i];
    if (x.on_boundary()) return x.point;
    std::tie(e, i) = t.at_slot(x.crossing, (x.slot + 2) % 4);
  }
  throw InputError("strand trace did not terminate");
}

}  // namespace

Connectivity connectivity(const TangleDiagram& t) {
  if (t.region().points != kAllPoints) throw InputError("connectivity needs a 4-ended tangle");
  int q = trace_to_point(t, 0);
  if (q == 2) return Connectivity::crossed;
  if (q == 1) return Connectivity::horizontal;
  return Connectivity::vertical;
}

// ---------------------------------------------------------------- glue

GlueResult glue_with_provenance(const TangleDiagram& inner, const TangleDiagram& outer) {
  if (inner.region().kind != RegionKind::disk || outer.region().kind != RegionKind::complement)
    throw InputError("glue needs a disk tangle and a complement tangle");
  if (inner.region().points != outer.region().points)
    throw InputError("glued tangles must share their boundary points");
  const TangleDiagram* side[2] = {&inner, &outer};
  const int offset[2] = {0, inner.num_crossings()};
  std::vector<bool> seen[2] = {std::vector<bool>(inner.num_edges()),
                               std::vector<bool>(outer.num_edges())};

  std::vector<CrossingSlots> xs(inner.num_crossings() + outer.num_crossings());
  std::vector<std::vector<GlueResult::Piece>> pieces;
  Heads heads;
  auto lift = [&](int s, const EdgeEnd& x) { return EdgeEnd{x.crossing + offset[s], x.slot, -1}; };

  // Walks from (s, e) leaving through end 1 - i; returns the final end.
  auto walk = [&](int s, int e, int i, std::vector<GlueResult::Piece>& out,
                  std::optional<bool>& forward) -> std::pair<int, EdgeEnd> {
    while (true) {
      seen[s][e] = true;
      out.push_back({s, e, i == 1});
      int h = side[s]->head(e);
      if (h >= 0) {
        bool f = (h == 1 - i);
        if (forward && *forward != f) throw OrientationConflict("incompatible orientations");
        forward = f;
      }
      const EdgeEnd& x = side[s]->ends(e)[1 - i];
      if (!x.on_boundary()) return {s, x};
      int s2 = 1 - s;
      std::tie(e, i) = side[s2]->at_point(x.point);
      s = s2;
      if (seen[s][e]) return {-1, x};  // closed loop of boundary arcs
    }
  };

  for (int s = 0; s < 2; ++s)
    for (int e = 0; e < side[s]->num_edges(); ++e) {
      if (seen[s][e] || side[s]->is_free_loop(e)) continue;
      auto ends = side[s]->ends(e);
      int start = ends[0].on_boundary() ? (ends[1].on_boundary() ? -1 : 1) : 0;
      if (start < 0) continue;
      int g = static_cast<int>(pieces.size());
      pieces.emplace_back();
      std::optional<bool> forward;
      // Leave through the far end; the start end becomes the glued edge's first end.
      auto [fs, last] = walk(s, e, start, pieces[g], forward);
      EdgeEnd first = lift(s, ends[start]);
      EdgeEnd second = lift(fs, last);
      xs[first.crossing][first.slot] = g;
      xs[second.crossing][second.slot] = g;
      heads.push_back(forward ? std::optional<EdgeEnd>(*forward ? second : first) : std::nullopt);
    }
  int loops_from_arcs = 0;
  for (int s = 0; s < 2; ++s)
    for (int e = 0; e < side[s]->num_edges(); ++e) {
      if (seen[s][e]) continue;
      pieces.emplace_back();
      if (!side[s]->is_free_loop(e)) {
        std::optional<bool> forward;
        walk(s, e, 0, pieces.back(), forward);
        ++loops_from_arcs;
      } else {
        seen[s][e] = true;
        pieces.back().push_back({s, e, false});
      }
      heads.push_back(std::nullopt);
    }
  (void)loops_from_arcs;
  int n = static_cast<int>(pieces.size());
  bool any_head = std::any_of(heads.begin(), heads.end(), [](const auto& h) { return bool(h); });
  TangleDiagram d(Region{RegionKind::plane, 0}, std::move(xs), {-1, -1, -1, -1}, n, {},
                  any_head ? std::move(heads) : Heads{});
  return GlueResult{std::move(d), std::move(pieces)};
}

TangleDiagram glue(const TangleDiagram& inner, const TangleDiagram& outer) {
  return glue_with_provenance(inner, outer).diagram;
}

std::pair<TangleDiagram, TangleDiagram> orient_pair(const TangleDiagram& inner,
                                                     const TangleDiagram& outer) {
  GlueResult g = glue_with_provenance(inner, outer);
  TangleDiagram full = orient_default(g.diagram);
  Heads side_heads[2] = {Heads(inner.num_edges()), Heads(outer.num_edges())};
  const TangleDiagram* side[2] = {&inner, &outer};
  for (int e = 0; e < full.num_edges(); ++e) {
    bool forward = full.head(e) != 0;  // undirected free loops count as forward
    for (const auto& pc : g.pieces[e]) {
      auto ends = side[pc.side]->ends(pc.edge);
      if (ends.size() != 2) continue;
      // A piece traversed from end i to end 1 - i.
      int entry = pc.reversed ? 1 : 0;
      side_heads[pc.side][pc.edge] = ends[forward ? 1 - entry : entry];
    }
  }
  auto rebuild = [](const TangleDiagram& t, Heads h) {
    return TangleDiagram(t.region(), t.crossings(),
                         {t.boundary_edge(0), t.boundary_edge(1), t.boundary_edge(2),
                          t.boundary_edge(3)},
                         t.num_edges(), t.labels(), std::move(h));
  };
  return {rebuild(inner, std::move(side_heads[0])), rebuild(outer, std::move(side_heads[1]))};
}

int count_link_components(const TangleDiagram& t) {
  UnionFind uf(t.num_edges());
  for (const auto& x : t.crossings()) {
    uf.unite(x[0], x[2]);
    uf.unite(x[1], x[3]);
  }
  return uf.count();
}

bool equivalent_diagrams(const TangleDiagram& x, const TangleDiagram& y) {
  if (!(x.region() == y.region()) || x.num_crossings() != y.num_crossings() ||
      x.num_edges() != y.num_edges())
    return false;
  for (int p = 0; p < kNumPoints; ++p)
    if (x.boundary_edge(p) != y.boundary_edge(p)) return false;
  for (int c = 0; c < x.num_crossings(); ++c) {
    const auto& a = x.crossing(c);
    const auto& b = y.crossing(c);
    CrossingSlots half{b[2], b[3], b[0], b[1]};
    if (a != b && a != half) return false;
  }
  if (x.is_oriented() && y.is_oriented())
    for (int e = 0; e < x.num_edges(); ++e) {
      auto hx = x.head_ends()[e], hy = y.head_ends()[e];
      if (hx.has_value() != hy.has_value()) return false;
      if (!hx) continue;
      // Compare by the slot-independent identity of the end.
      if (hx->on_boundary() != hy->on_boundary()) return false;
      if (hx->on_boundary() ? hx->point != hy->point : hx->crossing != hy->crossing) return false;
    }
  return true;
}

std::string to_pd_string(const TangleDiagram& t) {
  std::ostringstream os;
  for (int c = 0; c < t.num_crossings(); ++c) {
    const auto& x = t.crossing(c);
    if (c) os << ' ';
    os << "X(" << t.label(x[0]) << ',' << t.label(x[1]) << ',' << t.label(x[2]) << ','
       << t.label(x[3]) << ')';
  }
  for (int e = 0; e < t.num_edges(); ++e)
    if (t.is_free_loop(e)) os << (t.num_crossings() || e ? " O" : "O");
  return os.str();
}

}  // namespace khmut
