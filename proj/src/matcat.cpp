#include "khmut/matcat.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "khmut/parallel.hpp"

namespace khmut {

// ---------------------------------------------------------------- matrices

MatMorphism::MatMorphism(MatObject source, MatObject target)
    : source_(std::move(source)), target_(std::move(target)), columns_(source_.size()) {}

MatMorphism MatMorphism::identity(const MatObject& o) {
  MatMorphism m(o, o);
  for (int j = 0; j < m.cols(); ++j) m.columns_[j].push_back({j, identity_terms(*o[j].flat)});
  return m;
}

TermSet MatMorphism::entry_terms(int i, int j) const {
  const auto& col = columns_.at(j);
  auto it = std::lower_bound(col.begin(), col.end(), i,
                             [](const MatEntry& e, int r) { return e.row < r; });
  if (it != col.end() && it->row == i) return it->terms;
  return {};
}

Morphism MatMorphism::entry(int i, int j) const {
  return Morphism(source_.at(j), target_.at(i), entry_terms(i, j));
}

void MatMorphism::add(int i, int j, const TermSet& terms) {
  if (terms.empty()) return;
  if (i < 0 || i >= rows() || j < 0 || j >= cols()) throw InputError("matrix index out of range");
  auto& col = columns_[j];
  auto it = std::lower_bound(col.begin(), col.end(), i,
                             [](const MatEntry& e, int r) { return e.row < r; });
  if (it != col.end() && it->row == i) {
    it->terms = xor_terms(it->terms, terms);
    if (it->terms.empty()) col.erase(it);
  } else {
    col.insert(it, {i, terms});
  }
}

void MatMorphism::add(int i, int j, const Morphism& m) {
  if (!(m.source() == source_.at(j)) || !(m.target() == target_.at(i)))
    throw InputError("entry objects do not match the matrix");
  add(i, j, m.terms());
}

void MatMorphism::set_column(int j, std::vector<MatEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const MatEntry& x, const MatEntry& y) { return x.row < y.row; });
  std::erase_if(entries, [](const MatEntry& e) { return e.terms.empty(); });
  columns_.at(j) = std::move(entries);
}

bool MatMorphism::is_zero() const {
  return std::all_of(columns_.begin(), columns_.end(), [](const auto& c) { return c.empty(); });
}

size_t MatMorphism::num_entries() const {
  size_t n = 0;
  for (const auto& c : columns_) n += c.size();
  return n;
}

MatMorphism& MatMorphism::operator+=(const MatMorphism& o) {
  if (!(source_ == o.source_) || !(target_ == o.target_))
    throw InputError("adding matrices between different objects");
  for (int j = 0; j < cols(); ++j)
    for (const auto& e : o.columns_[j]) add(e.row, j, e.terms);
  return *this;
}

bool MatMorphism::operator==(const MatMorphism& o) const {
  if (!(source_ == o.source_) || !(target_ == o.target_)) return false;
  for (int j = 0; j < cols(); ++j) {
    const auto& x = columns_[j];
    const auto& y = o.columns_[j];
    if (x.size() != y.size()) return false;
    for (size_t k = 0; k < x.size(); ++k)
      if (x[k].row != y[k].row || x[k].terms != y[k].terms) return false;
  }
  return true;
}

MatMorphism compose(const MatMorphism& f, const MatMorphism& g) {
  if (!(g.target() == f.source())) throw InputError("matrix shapes do not compose");
  MatMorphism out(g.source(), f.target());
  std::vector<std::vector<MatEntry>> cols(g.cols());
  parallel_for(g.cols(), [&](size_t j) {
    std::map<int, TermSet> acc;
    const FlatTangle& src = *g.source()[j].flat;
    for (const auto& ge : g.column(static_cast<int>(j))) {
      const FlatTangle& mid = *g.target()[ge.row].flat;
      for (const auto& fe : f.column(ge.row)) {
        TermSet t = compose_terms(src, mid, *f.target()[fe.row].flat, fe.terms, ge.terms);
        if (t.empty()) continue;
        auto& slot = acc[fe.row];
        slot = xor_terms(slot, t);
      }
    }
    for (auto& [row, terms] : acc)
      if (!terms.empty()) cols[j].push_back({row, std::move(terms)});
  });
  for (int j = 0; j < g.cols(); ++j) out.set_column(j, std::move(cols[j]));
  return out;
}

MatObject tensor(const MatObject& x, const MatObject& y) {
  MatObject out;
  out.reserve(x.size() * y.size());
  for (const auto& a : x)
    for (const auto& b : y) out.push_back(tensor(a, b));
  return out;
}

MatMorphism tensor(const MatMorphism& f, const MatMorphism& g) {
  MatMorphism out(tensor(f.source(), g.source()), tensor(f.target(), g.target()));
  int gs = g.cols(), gt = g.rows();
  std::vector<std::vector<MatEntry>> cols(out.cols());
  parallel_for(out.cols(), [&](size_t col) {
    int a = static_cast<int>(col) / gs, b = static_cast<int>(col) % gs;
    for (const auto& fe : f.column(a))
      for (const auto& ge : g.column(b)) {
        TermSet t = tensor_terms(*f.source()[a].flat, *f.target()[fe.row].flat,
                                 *g.source()[b].flat, *g.target()[ge.row].flat, fe.terms,
                                 ge.terms);
        if (!t.empty()) cols[col].push_back({fe.row * gt + ge.row, std::move(t)});
      }
  });
  for (int j = 0; j < out.cols(); ++j) out.set_column(j, std::move(cols[j]));
  return out;
}

MatMorphism map_entries(const MatMorphism& f, const std::function<Morphism(const Morphism&)>& fn) {
  MatMorphism out(f.source(), f.target());
  for (int j = 0; j < f.cols(); ++j)
    for (const auto& e : f.column(j)) out.add(e.row, j, fn(f.entry(e.row, j)));
  return out;
}

std::optional<EntryLocation> first_difference(const MatMorphism& x, const MatMorphism& y) {
  if (x.cols() != y.cols() || x.rows() != y.rows()) return EntryLocation{0, -1, -1};
  for (int j = 0; j < x.cols(); ++j) {
    std::set<int> rows;
    for (const auto& e : x.column(j)) rows.insert(e.row);
    for (const auto& e : y.column(j)) rows.insert(e.row);
    for (int i : rows)
      if (x.entry_terms(i, j) != y.entry_terms(i, j)) return EntryLocation{0, i, j};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- graded

const MatObject& GradedObject::at(int i) const {
  static const MatObject empty;
  if (i < low || i > high()) return empty;
  return parts[i - low];
}

size_t GradedObject::total_size() const {
  size_t n = 0;
  for (const auto& p : parts) n += p.size();
  return n;
}

const MatMorphism* GradedMap::part(int i) const {
  auto it = parts.find(i);
  return it == parts.end() ? nullptr : &it->second;
}

bool GradedMap::is_zero() const {
  return std::all_of(parts.begin(), parts.end(), [](const auto& kv) { return kv.second.is_zero(); });
}

GradedMap identity_map(const GradedObject& o) {
  GradedMap m{0, {}};
  for (int i = o.low; i <= o.high(); ++i)
    if (!o.at(i).empty()) m.parts.emplace(i, MatMorphism::identity(o.at(i)));
  return m;
}

GradedMap zero_map(int degree) { return GradedMap{degree, {}}; }

GradedMap compose(const GradedMap& f, const GradedMap& g) {
  GradedMap out{f.degree + g.degree, {}};
  for (const auto& [i, gm] : g.parts) {
    const MatMorphism* fm = f.part(i + g.degree);
    if (!fm) continue;
    out.parts.emplace(i, compose(*fm, gm));
  }
  return out;
}

GradedMap operator+(const GradedMap& f, const GradedMap& g) {
  if (f.degree != g.degree && !f.is_zero() && !g.is_zero())
    throw InputError("adding graded maps of different degrees");
  GradedMap out{f.is_zero() ? g.degree : f.degree, f.parts};
  for (const auto& [i, m] : g.parts) {
    auto it = out.parts.find(i);
    if (it == out.parts.end()) out.parts.emplace(i, m);
    else it->second += m;
  }
  return out;
}

std::optional<EntryLocation> first_difference(const GradedMap& f, const GradedMap& g) {
  std::set<int> keys;
  for (const auto& kv : f.parts) keys.insert(kv.first);
  for (const auto& kv : g.parts) keys.insert(kv.first);
  for (int i : keys) {
    const MatMorphism* x = f.part(i);
    const MatMorphism* y = g.part(i);
    std::optional<EntryLocation> diff;
    if (x && y) {
      diff = first_difference(*x, *y);
    } else {
      const MatMorphism* z = x ? x : y;
      if (!z->is_zero()) diff = first_difference(*z, MatMorphism(z->source(), z->target()));
    }
    if (diff) {
      diff->degree = i;
      return diff;
    }
  }
  if (f.degree != g.degree && !f.is_zero()) return EntryLocation{0, -1, -1};
  return std::nullopt;
}

bool operator==(const GradedMap& f, const GradedMap& g) { return !first_difference(f, g); }

GradedMap map_entries(const GradedMap& f, const std::function<Morphism(const Morphism&)>& fn) {
  GradedMap out{f.degree, {}};
  for (const auto& [i, m] : f.parts) out.parts.emplace(i, map_entries(m, fn));
  return out;
}

MatMorphism Complex::differential(int i) const {
  if (const MatMorphism* m = d.part(i)) return *m;
  return MatMorphism(objects.at(i), objects.at(i + 1));
}

ComplexReport verify_complex(const Complex& c) {
  ComplexReport report;
  for (const auto& [i, m] : c.d.parts) {
    for (int j = 0; j < m.cols(); ++j)
      for (const auto& e : m.column(j)) {
        bool ok = true;
        try {
          ok = degree(m.entry(e.row, j)).value_or(0) == 0;
        } catch (const VerificationError&) {
          ok = false;
        }
        if (!ok) {
          report.degree_zero = false;
          report.degree_failures.push_back({i, e.row, j});
        }
      }
    const MatMorphism* next = c.d.part(i + 1);
    if (!next) continue;
    MatMorphism sq = compose(*next, m);
    for (int j = 0; j < sq.cols(); ++j)
      for (const auto& e : sq.column(j)) {
        report.d_squared_zero = false;
        report.d_squared_failures.push_back({i, e.row, j});
      }
  }
  return report;
}

// ---------------------------------------------------------------- tensor

std::pair<int, int> TensorLayout::position(int i, int a, int j, int b) const {
  auto it = blocks.find(i + j);
  if (it != blocks.end())
    for (const auto& blk : it->second)
      if (blk.i == i && blk.j == j)
        return {i + j, blk.offset + a * static_cast<int>(right.at(j).size()) + b};
  throw InputError("tensor block does not exist");
}

TensorLayout tensor_layout(const GradedObject& x, const GradedObject& y) {
  TensorLayout layout;
  layout.left = x;
  layout.right = y;
  layout.product.low = x.low + y.low;
  if (x.parts.empty() || y.parts.empty()) return layout;
  for (int n = x.low + y.low; n <= x.high() + y.high(); ++n) {
    MatObject part;
    for (int i = x.low; i <= x.high(); ++i) {
      int j = n - i;
      if (j < y.low || j > y.high() || x.at(i).empty() || y.at(j).empty()) continue;
      layout.blocks[n].push_back({i, j, static_cast<int>(part.size())});
      MatObject t = tensor(x.at(i), y.at(j));
      part.insert(part.end(), t.begin(), t.end());
    }
    layout.product.parts.push_back(std::move(part));
  }
  return layout;
}

GradedMap tensor_maps(const GradedMap& f, const GradedMap& g, const TensorLayout& src,
                      const TensorLayout& tgt) {
  GradedMap out{f.degree + g.degree, {}};
  for (const auto& [n, blocks] : src.blocks) {
    const MatObject& target_obj = tgt.product.at(n + out.degree);
    MatMorphism part(src.product.at(n), target_obj);
    bool any = false;
    for (const auto& blk : blocks) {
      const MatMorphism* fm = f.part(blk.i);
      const MatMorphism* gm = g.part(blk.j);
      if (!fm || !gm || fm->is_zero() || gm->is_zero()) continue;
      any = true;
      auto [tn, toff] = tgt.position(blk.i + f.degree, 0, blk.j + g.degree, 0);
      (void)tn;
      int ys = gm->cols(), yt = gm->rows();
      std::vector<std::vector<MatEntry>> cols(static_cast<size_t>(fm->cols()) * ys);
      parallel_for(cols.size(), [&](size_t col) {
        int a = static_cast<int>(col) / ys, b = static_cast<int>(col) % ys;
        for (const auto& fe : fm->column(a))
          for (const auto& ge : gm->column(b)) {
            TermSet t = tensor_terms(*fm->source()[a].flat, *fm->target()[fe.row].flat,
                                     *gm->source()[b].flat, *gm->target()[ge.row].flat,
                                     fe.terms, ge.terms);
            if (!t.empty()) cols[col].push_back({toff + fe.row * yt + ge.row, std::move(t)});
          }
      });
      for (size_t col = 0; col < cols.size(); ++col)
        for (auto& e : cols[col]) part.add(e.row, blk.offset + static_cast<int>(col), e.terms);
    }
    if (any) out.parts.emplace(n, std::move(part));
  }
  return out;
}

Complex complex_tensor(const Complex& x, const Complex& y) {
  TensorLayout layout = tensor_layout(x.objects, y.objects);
  Complex out;
  out.objects = layout.product;
  out.d = tensor_maps(x.d, identity_map(y.objects), layout, layout) +
          tensor_maps(identity_map(x.objects), y.d, layout, layout);
  out.d.degree = 1;
  return out;
}

// ---------------------------------------------------------------- delooping

namespace {

FlatRef circle_free(const FlatTangle& f) {
  auto bare = make_flat(f.region(), f.points(), f.partners(), 0);
  for (const FlatRef& canonical : {flat_o0(), flat_o1(), empty_flat()})
    if (bare->same_shape(*canonical)) return canonical;
  return bare;
}

int summand_bit(int summand, int circles, int i) { return (summand >> (circles - 1 - i)) & 1; }

std::vector<int> summand_offsets(const MatObject& o) {
  std::vector<int> off(o.size() + 1, 0);
  for (size_t j = 0; j < o.size(); ++j) off[j + 1] = off[j] + (1 << o[j].flat->num_circles());
  return off;
}

}  // namespace

MatObject deloop_object(const MatObject& o) {
  MatObject out;
  for (const auto& x : o) {
    int k = x.flat->num_circles();
    FlatRef bare = circle_free(*x.flat);
    for (int s = 0; s < (1 << k); ++s) out.push_back({bare, x.shift + k - 2 * popcount(s)});
  }
  return out;
}

MatMorphism deloop_into(const MatObject& o) {
  MatMorphism m(o, deloop_object(o));
  auto off = summand_offsets(o);
  for (size_t j = 0; j < o.size(); ++j) {
    int k = o[j].flat->num_circles();
    const CurveSet& cs = boundary_curves(*o[j].flat, *m.target()[off[j]].flat);
    for (int s = 0; s < (1 << k); ++s) {
      uint64_t dots = 0;
      for (int i = 0; i < k; ++i)
        if (!summand_bit(s, k, i)) dots |= uint64_t{1} << cs.circle1[i];
      m.add(off[j] + s, static_cast<int>(j), TermSet{{dots, 0}});
    }
  }
  return m;
}

MatMorphism deloop_from(const MatObject& o) {
  MatMorphism m(deloop_object(o), o);
  auto off = summand_offsets(o);
  for (size_t j = 0; j < o.size(); ++j) {
    int k = o[j].flat->num_circles();
    const CurveSet& cs = boundary_curves(*m.source()[off[j]].flat, *o[j].flat);
    for (int s = 0; s < (1 << k); ++s) {
      uint64_t dots = 0;
      for (int i = 0; i < k; ++i)
        if (summand_bit(s, k, i)) dots |= uint64_t{1} << cs.circle2[i];
      m.add(static_cast<int>(j), off[j] + s, TermSet{{dots, 0}});
    }
  }
  return m;
}

// A term S: O -> O' survives between the summands (s', s) exactly when each
// source circle curve is dotted iff s puts shift +1 there and each target
// circle curve is dotted iff s' puts shift -1 there; the spheres closed off by
// the caps and cups then carry one dot each.
MatMorphism deloop_morphism(const MatMorphism& f) {
  MatMorphism out(deloop_object(f.source()), deloop_object(f.target()));
  auto soff = summand_offsets(f.source());
  auto toff = summand_offsets(f.target());
  std::vector<std::vector<MatEntry>> cols(out.cols());
  for (int j = 0; j < f.cols(); ++j) {
    const FlatTangle& src = *f.source()[j].flat;
    int ks = src.num_circles();
    for (const auto& e : f.column(j)) {
      const FlatTangle& tgt = *f.target()[e.row].flat;
      int kt = tgt.num_circles();
      const CurveSet& cs = boundary_curves(src, tgt);
      uint64_t cycle_mask = (uint64_t{1} << cs.num_cycles) - 1;
      std::map<std::pair<int, int>, TermSet> acc;
      for (const auto& term : e.terms) {
        int s = 0, s2 = 0;
        for (int i = 0; i < ks; ++i) s = (s << 1) | (((term.dots >> cs.circle1[i]) & 1u) ? 0 : 1);
        for (int i = 0; i < kt; ++i) s2 = (s2 << 1) | static_cast<int>((term.dots >> cs.circle2[i]) & 1u);
        acc[{toff[e.row] + s2, soff[j] + s}].push_back({term.dots & cycle_mask, term.t});
      }
      for (auto& [rc, terms] : acc) {
        canonicalize(terms);
        if (!terms.empty()) cols[rc.second].push_back({rc.first, std::move(terms)});
      }
    }
  }
  for (int j = 0; j < out.cols(); ++j) {
    auto& col = cols[j];
    std::sort(col.begin(), col.end(), [](const MatEntry& x, const MatEntry& y) { return x.row < y.row; });
    std::vector<MatEntry> merged;
    for (auto& e : col) {
      if (!merged.empty() && merged.back().row == e.row) merged.back().terms = xor_terms(merged.back().terms, e.terms);
      else merged.push_back(std::move(e));
    }
    out.set_column(j, std::move(merged));
  }
  return out;
}

DeloopResult deloop(const Complex& c, bool with_isomorphisms) {
  DeloopResult r;
  r.complex.objects.low = c.objects.low;
  for (const auto& part : c.objects.parts) r.complex.objects.parts.push_back(deloop_object(part));
  for (const auto& [i, m] : c.d.parts) r.complex.d.parts.emplace(i, deloop_morphism(m));
  r.into = zero_map(0);
  r.from = zero_map(0);
  if (with_isomorphisms)
    for (int i = c.objects.low; i <= c.objects.high(); ++i) {
      if (c.objects.at(i).empty()) continue;
      r.into.parts.emplace(i, deloop_into(c.objects.at(i)));
      r.from.parts.emplace(i, deloop_from(c.objects.at(i)));
    }
  return r;
}

Complex straighten(const Complex& c) {
  auto fix = [](const MatObject& o) {
    MatObject out;
    for (const auto& x : o) {
      const FlatTangle& f = *x.flat;
      if (f.region() != RegionKind::disk || f.points() != kAllPoints || f.num_circles() != 0)
        throw InputError("straightening needs circle-free four-ended disk objects");
      out.push_back({f.partner(0) == 3 ? flat_o0() : flat_o1(), x.shift});
    }
    return out;
  };
  Complex out;
  out.objects.low = c.objects.low;
  for (const auto& part : c.objects.parts) out.objects.parts.push_back(fix(part));
  for (const auto& [i, m] : c.d.parts) {
    MatMorphism s(fix(m.source()), fix(m.target()));
    for (int j = 0; j < m.cols(); ++j) s.set_column(j, m.column(j));
    out.d.parts.emplace(i, std::move(s));
  }
  return out;
}

Complex enhanced_deloop(const Complex& c) { return straighten(deloop(c).complex); }

// ---------------------------------------------------------------- scalars

ScalarComplex specialize(const Complex& delooped, int t) {
  ScalarComplex out;
  out.low = delooped.objects.low;
  for (const auto& part : delooped.objects.parts) {
    std::vector<int> q;
    for (const auto& x : part) {
      if (x.flat->num_points() != 0 || x.flat->num_circles() != 0)
        throw InputError("specialization needs a delooped closed complex");
      q.push_back(x.shift);
    }
    out.qdeg.push_back(std::move(q));
  }
  for (size_t k = 0; k + 1 < out.qdeg.size(); ++k) {
    int i = out.low + static_cast<int>(k);
    std::vector<std::vector<int>> cols(out.qdeg[k].size());
    if (const MatMorphism* m = delooped.d.part(i))
      for (int j = 0; j < m->cols(); ++j)
        for (const auto& e : m->column(j)) {
          size_t n = t == 0 ? std::count_if(e.terms.begin(), e.terms.end(),
                                            [](const Term& x) { return x.t == 0; })
                            : e.terms.size();
          if (n % 2) cols[j].push_back(e.row);
        }
    out.d.push_back(std::move(cols));
  }
  return out;
}

ScalarComplex gaussian_eliminate(const ScalarComplex& c, int t) {
  size_t levels = c.qdeg.size();
  std::vector<std::vector<bool>> alive(levels);
  // forward[k][x] = rows hit by x in level k + 1; backward[k+1][y] = columns hitting y.
  std::vector<std::vector<std::set<int>>> forward(levels), backward(levels);
  for (size_t k = 0; k < levels; ++k) {
    alive[k].assign(c.qdeg[k].size(), true);
    forward[k].resize(c.qdeg[k].size());
    backward[k].resize(c.qdeg[k].size());
  }
  for (size_t k = 0; k + 1 < levels; ++k)
    for (size_t x = 0; x < c.d[k].size(); ++x)
      for (int y : c.d[k][x]) {
        forward[k][x].insert(y);
        backward[k + 1][y].insert(static_cast<int>(x));
      }
  auto toggle = [&](size_t k, int x, int y) {
    if (!forward[k][x].erase(y)) {
      forward[k][x].insert(y);
      backward[k + 1][y].insert(x);
    } else {
      backward[k + 1][y].erase(x);
    }
  };
  auto remove = [&](size_t k, int v) {
    alive[k][v] = false;
    for (int y : forward[k][v]) backward[k + 1][y].erase(v);
    forward[k][v].clear();
    if (k > 0) {
      for (int x : backward[k][v]) forward[k - 1][x].erase(v);
      backward[k][v].clear();
    }
  };
  for (size_t k = 0; k + 1 < levels; ++k)
    for (int x = 0; x < static_cast<int>(c.qdeg[k].size()); ++x) {
      if (!alive[k][x]) continue;
      std::optional<int> pivot;
      for (int y : forward[k][x])
        if (t != 0 || c.qdeg[k + 1][y] == c.qdeg[k][x]) {
          pivot = y;
          break;
        }
      if (!pivot) continue;
      int y = *pivot;
      // d' = d + d(-, x) d(y, -) on the remaining generators.
      std::vector<int> col(forward[k][x].begin(), forward[k][x].end());
      std::vector<int> row(backward[k + 1][y].begin(), backward[k + 1][y].end());
      for (int y2 : col) {
        if (y2 == y) continue;
        for (int x2 : row)
          if (x2 != x) toggle(k, x2, y2);
      }
      remove(k, x);
      remove(k + 1, y);
    }
  ScalarComplex out;
  out.low = c.low;
  std::vector<std::vector<int>> index(levels);
  for (size_t k = 0; k < levels; ++k) {
    index[k].assign(c.qdeg[k].size(), -1);
    std::vector<int> q;
    for (size_t v = 0; v < c.qdeg[k].size(); ++v)
      if (alive[k][v]) {
        index[k][v] = static_cast<int>(q.size());
        q.push_back(c.qdeg[k][v]);
      }
    out.qdeg.push_back(std::move(q));
  }
  for (size_t k = 0; k + 1 < levels; ++k) {
    std::vector<std::vector<int>> cols(out.qdeg[k].size());
    for (size_t x = 0; x < c.qdeg[k].size(); ++x) {
      if (!alive[k][x]) continue;
      for (int y : forward[k][x]) cols[index[k][x]].push_back(index[k + 1][y]);
    }
    out.d.push_back(std::move(cols));
  }
  return out;
}

// ---------------------------------------------------------------- dump

namespace {

nlohmann::json object_json(const CobObject& o) {
  const FlatTangle& f = *o.flat;
  std::string matching;
  for (int p = 0; p < kNumPoints; ++p)
    if (f.partner(p) > p) {
      if (!matching.empty()) matching += ',';
      matching += point_name(p);
      matching += point_name(f.partner(p));
    }
  return {{"region", std::string(region_name(f.region()))},
          {"matching", matching},
          {"circles", f.num_circles()},
          {"shift", o.shift}};
}

}  // namespace

std::string dump_complex(const Complex& c) {
  nlohmann::json j;
  j["low"] = c.objects.low;
  j["objects"] = nlohmann::json::array();
  for (const auto& part : c.objects.parts) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& o : part) row.push_back(object_json(o));
    j["objects"].push_back(row);
  }
  j["differentials"] = nlohmann::json::array();
  for (const auto& [i, m] : c.d.parts) {
    nlohmann::json entries = nlohmann::json::array();
    for (int col = 0; col < m.cols(); ++col)
      for (const auto& e : m.column(col)) {
        const CurveSet& cs = boundary_curves(*m.source()[col].flat, *m.target()[e.row].flat);
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& t : e.terms) {
          nlohmann::json dots = nlohmann::json::array();
          for (int k = 0; k < cs.count; ++k)
            if ((t.dots >> k) & 1u) dots.push_back(describe_curve(cs, k));
          terms.push_back({{"dots", dots}, {"t", t.t}});
        }
        entries.push_back({{"row", e.row}, {"col", col}, {"terms", terms}});
      }
    j["differentials"].push_back({{"degree", i}, {"entries", entries}});
  }
  return j.dump(1);
}

}  // namespace khmut
