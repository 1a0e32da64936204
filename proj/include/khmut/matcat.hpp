#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "khmut/cob.hpp"

namespace khmut {

using MatObject = std::vector<CobObject>;

struct MatEntry {
  int row;
  TermSet terms;
};

// Sparse matrix of cobordisms; entry (i, j) maps source[j] to target[i].
class MatMorphism {
 public:
  MatMorphism() = default;
  MatMorphism(MatObject source, MatObject target);
  static MatMorphism identity(const MatObject& o);

  const MatObject& source() const { return source_; }
  const MatObject& target() const { return target_; }
  int rows() const { return static_cast<int>(target_.size()); }
  int cols() const { return static_cast<int>(source_.size()); }
  // Nonzero entries of column j, rows ascending.
  const std::vector<MatEntry>& column(int j) const { return columns_[j]; }
  TermSet entry_terms(int i, int j) const;
  Morphism entry(int i, int j) const;

  // Adds terms to entry (i, j) over F_2.
  void add(int i, int j, const TermSet& terms);
  void add(int i, int j, const Morphism& m);
  void set_column(int j, std::vector<MatEntry> entries);

  bool is_zero() const;
  size_t num_entries() const;
  MatMorphism& operator+=(const MatMorphism& o);
  friend MatMorphism operator+(MatMorphism x, const MatMorphism& y) { return x += y; }
  bool operator==(const MatMorphism& o) const;

 private:
  MatObject source_, target_;
  std::vector<std::vector<MatEntry>> columns_;
};

// f o g.
MatMorphism compose(const MatMorphism& f, const MatMorphism& g);
// Kronecker product: index i * size(y) + k.
MatObject tensor(const MatObject& x, const MatObject& y);
MatMorphism tensor(const MatMorphism& f, const MatMorphism& g);
// Applies fn to every nonzero entry; fn keeps the entry's source and target.
MatMorphism map_entries(const MatMorphism& f, const std::function<Morphism(const Morphism&)>& fn);

struct EntryLocation {
  int degree = 0;
  int row = 0;
  int col = 0;
};
std::optional<EntryLocation> first_difference(const MatMorphism& x, const MatMorphism& y);

// Objects indexed by homological degree low, low + 1, ...
struct GradedObject {
  int low = 0;
  std::vector<MatObject> parts;

  const MatObject& at(int i) const;
  int high() const { return low + static_cast<int>(parts.size()) - 1; }
  size_t total_size() const;
  bool operator==(const GradedObject& o) const { return low == o.low && parts == o.parts; }
};

// Homogeneous map of homological degree `degree`; parts[i] maps degree i to
// degree i + degree. Missing parts are zero.
struct GradedMap {
  int degree = 0;
  std::map<int, MatMorphism> parts;

  const MatMorphism* part(int i) const;
  bool is_zero() const;
};

GradedMap identity_map(const GradedObject& o);
GradedMap zero_map(int degree);
GradedMap compose(const GradedMap& f, const GradedMap& g);
GradedMap operator+(const GradedMap& f, const GradedMap& g);
bool operator==(const GradedMap& f, const GradedMap& g);
std::optional<EntryLocation> first_difference(const GradedMap& f, const GradedMap& g);
GradedMap map_entries(const GradedMap& f, const std::function<Morphism(const Morphism&)>& fn);

struct Complex {
  GradedObject objects;
  GradedMap d{1, {}};

  // d^i, zero when absent.
  MatMorphism differential(int i) const;
};

struct ComplexReport {
  bool d_squared_zero = true;
  bool degree_zero = true;
  std::vector<EntryLocation> d_squared_failures;
  std::vector<EntryLocation> degree_failures;
  bool ok() const { return d_squared_zero && degree_zero; }
};
ComplexReport verify_complex(const Complex& c);

// Block structure of the total complex of a tensor product.
struct TensorLayout {
  struct Block {
    int i, j, offset;
  };
  GradedObject left, right, product;
  std::map<int, std::vector<Block>> blocks;

  std::pair<int, int> position(int i, int a, int j, int b) const;
};
TensorLayout tensor_layout(const GradedObject& x, const GradedObject& y);
// f (x) g between products laid out by src and tgt; no signs over F_2.
GradedMap tensor_maps(const GradedMap& f, const GradedMap& g, const TensorLayout& src,
                      const TensorLayout& tgt);
Complex complex_tensor(const Complex& x, const Complex& y);

// Delooping replaces an object with k circles by its 2^k circle-free
// summands. Summand s of a circle list has circle 0 as the most significant
// bit, bit 0 meaning shift +1 and bit 1 meaning shift -1.
MatObject deloop_object(const MatObject& o);
// The isomorphism O -> D(O) and its inverse.
MatMorphism deloop_into(const MatObject& o);
MatMorphism deloop_from(const MatObject& o);
// D(f) = into(target) o f o from(source), computed entrywise without composing.
MatMorphism deloop_morphism(const MatMorphism& f);

struct DeloopResult {
  Complex complex;
  GradedMap into, from;
};
DeloopResult deloop(const Complex& c, bool with_isomorphisms = false);

// Replaces circle-free four-ended disk objects by the canonical O_0 / O_1.
Complex straighten(const Complex& c);
// Straightening after delooping.
Complex enhanced_deloop(const Complex& c);

// A complex of F_2 vector spaces: a generator per summand with its q-degree.
struct ScalarComplex {
  int low = 0;
  std::vector<std::vector<int>> qdeg;
  // d[k][col] = rows of degree low + k + 1, ascending.
  std::vector<std::vector<std::vector<int>>> d;
};
// Specializes a delooped closed complex at t = 0 or t = 1.
ScalarComplex specialize(const Complex& delooped, int t);
// Cancels invertible entries (degree-preserving ones at t = 0).
ScalarComplex gaussian_eliminate(const ScalarComplex& c, int t);

std::string dump_complex(const Complex& c);

}  // namespace khmut
