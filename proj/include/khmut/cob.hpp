#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "khmut/diagrams.hpp"

namespace khmut {

class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CobObject {
  FlatRef flat;
  int shift = 0;

  CobObject shifted(int m) const { return {flat, shift + m}; }
  bool operator==(const CobObject& o) const {
    return shift == o.shift && (flat == o.flat || flat->same_shape(*o.flat));
  }
};

// One normal-form term: a dotted disk on every boundary curve whose bit is
// set in `dots`, an undotted disk on every other curve, times t^t.
struct Term {
  uint64_t dots = 0;
  uint32_t t = 0;
  auto operator<=>(const Term&) const = default;
};

// Sorted, duplicate-free; addition is symmetric difference.
using TermSet = std::vector<Term>;

void canonicalize(TermSet& terms);
TermSet xor_terms(const TermSet& x, const TermSet& y);

// Boundary curves of a cobordism between o1 (bottom) and o2 (top). Cycles
// through the boundary points come first, ordered by their smallest point,
// then the circles of o1, then the circles of o2.
struct CurveSet {
  int count = 0;
  int num_cycles = 0;
  std::vector<int> arc1, arc2;        // curve of each arc of o1, o2
  std::vector<int> circle1, circle2;  // curve of each circle of o1, o2
  std::array<int, kNumPoints> point{-1, -1, -1, -1};  // curve through p x [0,1]
  std::vector<uint8_t> cycle_points;  // point set of each cycle
};

const CurveSet& boundary_curves(const FlatTangle& o1, const FlatTangle& o2);
std::string describe_curve(const CurveSet& cs, int curve);

// Surface before relations: components partition the curves.
struct PreComponent {
  uint64_t curves = 0;
  int genus = 0;
  int dots = 0;
};

struct PreCobordism {
  std::vector<PreComponent> components;
  uint32_t t = 0;
};

// Applies the sphere, dot, neck-cutting and double-dot relations. Curves are
// cut in the order given (ascending by default).
TermSet reduce(const PreCobordism& pre, std::span<const int> cut_order = {});

class Morphism {
 public:
  Morphism(CobObject source, CobObject target, TermSet terms = {});

  static Morphism identity(const CobObject& o);

  const CobObject& source() const { return source_; }
  const CobObject& target() const { return target_; }
  const TermSet& terms() const { return terms_; }
  const CurveSet& curves() const { return boundary_curves(*source_.flat, *target_.flat); }
  bool is_zero() const { return terms_.empty(); }

  Morphism& operator+=(const Morphism& o);
  friend Morphism operator+(Morphism x, const Morphism& y) { return x += y; }
  bool operator==(const Morphism& o) const {
    return source_ == o.source_ && target_ == o.target_ && terms_ == o.terms_;
  }
  // Multiplies by t^n.
  Morphism times_t(uint32_t n) const;

 private:
  CobObject source_;
  CobObject target_;
  TermSet terms_;
};

// A surface whose components are given by a group label per curve of
// (source, target); every component is an undotted genus-0 surface.
Morphism surface_morphism(const CobObject& source, const CobObject& target,
                          const std::vector<int>& group_of_curve);

TermSet identity_terms(const FlatTangle& o);

// s2 o s1 on raw term sets over flats o1 -> o2 -> o3.
TermSet compose_terms(const FlatTangle& o1, const FlatTangle& o2, const FlatTangle& o3,
                      const TermSet& s2, const TermSet& s1);
Morphism compose(const Morphism& s2, const Morphism& s1);

// Union of objects in complementary regions, glued along their shared points.
struct GluedFlat {
  struct Source {
    int side;  // 0 = first factor, 1 = second
    Component component;
  };
  FlatRef flat;
  std::vector<Source> arc_source, circle_source;
};
const GluedFlat& glue_flats(const FlatTangle& x, const FlatTangle& y);
CobObject tensor(const CobObject& x, const CobObject& y);
TermSet tensor_terms(const FlatTangle& x1, const FlatTangle& x2, const FlatTangle& y1,
                     const FlatTangle& y2, const TermSet& sx, const TermSet& sy);
Morphism tensor(const Morphism& x, const Morphism& y);

int term_degree(const Morphism& s, const Term& term);
// Degree of a homogeneous morphism; throws on mixed degrees, nullopt for zero.
std::optional<int> degree(const Morphism& s);

// Curve of (source, target) containing a component of the target (or source).
int curve_of_component(const Morphism& s, Component comp, bool on_target);

// Adds one dot to the given curve of every term (then applies the double-dot relation).
TermSet add_dot(const TermSet& terms, int curve);
Morphism dot_multiply(const Morphism& s, int point);
Morphism dot_multiply_component(const Morphism& s, Component comp, bool on_target = true);
// X_p as an endomorphism of an object.
Morphism dot_endomorphism(const CobObject& o, int point);

TermSet dot_derivative_terms(const TermSet& terms);
Morphism dot_derivative(const Morphism& s);

// Time reversal.
Morphism reversed(const Morphism& s);

FlatRef rotate_flat_z(const FlatTangle& o);
Morphism rotate_cob(const Morphism& s);

}  // namespace khmut
