#include "khmut/homology.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "khmut/union_find.hpp"

namespace khmut {

int HomologyTable::total() const {
  int n = 0;
  for (const auto& [k, v] : bigraded) n += v;
  if (bigraded.empty())
    for (const auto& [k, v] : graded) n += v;
  return n;
}

std::vector<int> hom_from_empty(const CobObject& o) {
  if (o.flat->num_points() != 0) throw InputError("Hom(empty, O) needs a closed object");
  int k = o.flat->num_circles();
  std::vector<int> q(size_t{1} << k);
  for (size_t s = 0; s < q.size(); ++s) q[s] = k - 2 * popcount(s) + o.shift;
  return q;
}

ScalarComplex linearize(const Complex& c, int t) { return specialize(deloop(c).complex, t); }

ScalarComplex linearize_by_composition(const Complex& c, int t) {
  ScalarComplex out;
  out.low = c.objects.low;
  std::vector<std::vector<int>> offsets;
  for (const auto& part : c.objects.parts) {
    std::vector<int> q, off{0};
    for (const auto& o : part) {
      auto basis = hom_from_empty(o);
      q.insert(q.end(), basis.begin(), basis.end());
      off.push_back(static_cast<int>(q.size()));
    }
    out.qdeg.push_back(std::move(q));
    offsets.push_back(std::move(off));
  }
  CobObject empty{empty_flat(), 0};
  for (size_t k = 0; k + 1 < c.objects.parts.size(); ++k) {
    std::vector<std::vector<int>> cols(out.qdeg[k].size());
    const MatMorphism* d = c.d.part(c.objects.low + static_cast<int>(k));
    if (d)
      for (int j = 0; j < d->cols(); ++j) {
        const CobObject& src = d->source()[j];
        int ks = src.flat->num_circles();
        const CurveSet& in = boundary_curves(*empty.flat, *src.flat);
        for (int s = 0; s < (1 << ks); ++s) {
          uint64_t dots = 0;
          for (int i = 0; i < ks; ++i)
            if ((s >> (ks - 1 - i)) & 1) dots |= uint64_t{1} << in.circle2[i];
          int q = out.qdeg[k][offsets[k][j] + s];
          Morphism beta(empty.shifted(q), src, {{dots, 0}});
          std::set<int> rows;
          for (const auto& e : d->column(j)) {
            Morphism image = compose(d->entry(e.row, j), beta);
            const CobObject& tgt = d->target()[e.row];
            int kt = tgt.flat->num_circles();
            const CurveSet& outc = image.curves();
            for (const auto& term : image.terms()) {
              if (t == 0 && term.t != 0) continue;
              int s2 = 0;
              for (int i = 0; i < kt; ++i)
                s2 = (s2 << 1) | static_cast<int>((term.dots >> outc.circle2[i]) & 1u);
              int row = offsets[k + 1][e.row] + s2;
              if (!rows.erase(row)) rows.insert(row);
            }
          }
          cols[offsets[k][j] + s].assign(rows.begin(), rows.end());
        }
      }
    out.d.push_back(std::move(cols));
  }
  return out;
}

namespace {

// Rank over F_2 of sparse columns (sorted row lists), by pivoting on the
// largest row index.
int sparse_rank(std::vector<std::vector<int>> cols) {
  std::map<int, size_t> pivot_of_row;
  int rank = 0;
  for (size_t j = 0; j < cols.size(); ++j) {
    auto& col = cols[j];
    while (!col.empty()) {
      auto it = pivot_of_row.find(col.back());
      if (it == pivot_of_row.end()) break;
      std::vector<int> sum;
      const auto& other = cols[it->second];
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                    std::back_inserter(sum));
      col = std::move(sum);
    }
    if (!col.empty()) {
      pivot_of_row[col.back()] = j;
      ++rank;
    }
  }
  return rank;
}

}  // namespace

HomologyTable f2_homology(const ScalarComplex& c, int t) {
  size_t levels = c.qdeg.size();
  // d^{k+1} o d^k = 0.
  for (size_t k = 0; k + 2 < levels; ++k)
    for (const auto& col : c.d[k]) {
      std::set<int> acc;
      for (int y : col)
        for (int z : c.d[k + 1][y])
          if (!acc.erase(z)) acc.insert(z);
      if (!acc.empty()) throw VerificationError("linear complex has nonzero d^2");
    }
  auto key = [&](size_t k, int v) { return t == 0 ? c.qdeg[k][v] : 0; };
  // rank_out[k][q] = rank of d^k restricted to q-block q.
  std::vector<std::map<int, int>> rank_out(levels);
  for (size_t k = 0; k + 1 < levels; ++k) {
    std::map<int, std::vector<std::vector<int>>> blocks;
    for (size_t x = 0; x < c.d[k].size(); ++x) {
      std::vector<int> col;
      for (int y : c.d[k][x]) {
        if (t == 0 && c.qdeg[k + 1][y] != c.qdeg[k][x])
          throw VerificationError("t = 0 differential changes the quantum degree");
        col.push_back(y);
      }
      blocks[key(k, static_cast<int>(x))].push_back(std::move(col));
    }
    for (auto& [q, cols] : blocks) rank_out[k][q] = sparse_rank(std::move(cols));
  }
  HomologyTable h;
  h.t = t;
  for (size_t k = 0; k < levels; ++k) {
    std::map<int, int> count;
    for (size_t v = 0; v < c.qdeg[k].size(); ++v) ++count[key(k, static_cast<int>(v))];
    for (auto [q, n] : count) {
      int dim = n - rank_out[k][q] - (k > 0 ? rank_out[k - 1][q] : 0);
      int i = c.low + static_cast<int>(k);
      if (dim == 0) continue;
      if (t == 0) h.bigraded[{i, q}] += dim;
      h.graded[i] += dim;
    }
  }
  return h;
}

HomologyTable complex_homology(const Complex& closed, int t, bool simplify) {
  ScalarComplex s = linearize(closed, t);
  if (simplify) s = gaussian_eliminate(s, t);
  return f2_homology(s, t);
}

HomologyTable khovanov_homology(const TangleDiagram& link, int t, bool simplify, int jobs) {
  if (!link.is_closed()) throw InputError("Khovanov homology needs a closed diagram");
  BracketOptions opts;
  opts.jobs = jobs;
  return complex_homology(khovanov_bracket(link, opts).complex, t, simplify);
}

// ---------------------------------------------------------------- oracle

namespace {

struct Smoothing {
  int circles = 0;
  std::vector<int> circle_of_edge;
};

Smoothing smooth(const TangleDiagram& t, uint64_t eps) {
  UnionFind uf(t.num_edges());
  for (int c = 0; c < t.num_crossings(); ++c) {
    const auto& x = t.crossing(c);
    if ((eps >> c) & 1u) {
      uf.unite(x[1], x[2]);
      uf.unite(x[3], x[0]);
    } else {
      uf.unite(x[0], x[1]);
      uf.unite(x[2], x[3]);
    }
  }
  Smoothing s;
  std::map<int, int> label;
  s.circle_of_edge.resize(t.num_edges());
  for (int e = 0; e < t.num_edges(); ++e) {
    auto [it, fresh] = label.try_emplace(uf.find(e), s.circles);
    if (fresh) ++s.circles;
    s.circle_of_edge[e] = it->second;
  }
  return s;
}

// Rank over F_2 of a dense matrix given as rows of 64-bit words.
int dense_rank(std::vector<std::vector<uint64_t>> rows) {
  int rank = 0;
  size_t words = rows.empty() ? 0 : rows[0].size();
  for (size_t col = 0; col < words * 64 && rank < static_cast<int>(rows.size()); ++col) {
    size_t w = col / 64;
    uint64_t bit = uint64_t{1} << (col % 64);
    size_t pivot = rank;
    while (pivot < rows.size() && !(rows[pivot][w] & bit)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    for (size_t r = 0; r < rows.size(); ++r)
      if (r != static_cast<size_t>(rank) && (rows[r][w] & bit))
        for (size_t k = 0; k < words; ++k) rows[r][k] ^= rows[rank][k];
    ++rank;
  }
  return rank;
}

}  // namespace

HomologyTable oracle_state_sum(const TangleDiagram& link, int t) {
  if (!link.is_closed()) throw InputError("the state sum needs a closed diagram");
  auto [np, nm] = crossing_signs(link);
  int n = link.num_crossings();
  uint64_t states = uint64_t{1} << n;
  std::vector<Smoothing> sm(states);
  for (uint64_t e = 0; e < states; ++e) sm[e] = smooth(link, e);

  // Generators (state, v): bit i of v set means x on circle i.
  struct Gen {
    uint64_t state;
    uint32_t v;
  };
  std::map<std::pair<int, int>, std::vector<Gen>> blocks;  // (i, block key) -> generators
  auto block_key = [&](uint64_t e, uint32_t v) {
    int q = sm[e].circles - 2 * popcount(v) + popcount(e) + np - 2 * nm;
    return t == 0 ? q : 0;
  };
  std::map<std::pair<uint64_t, uint32_t>, std::pair<std::pair<int, int>, int>> where;
  for (uint64_t e = 0; e < states; ++e)
    for (uint32_t v = 0; v < (1u << sm[e].circles); ++v) {
      std::pair<int, int> bk{popcount(e) - nm, block_key(e, v)};
      where[{e, v}] = {bk, static_cast<int>(blocks[bk].size())};
      blocks[bk].push_back({e, v});
    }

  // Image of a generator along the edge e -> e + c, as a set of target v's.
  auto image = [&](uint64_t e, uint32_t v, int c) {
    uint64_t e1 = e | (uint64_t{1} << c);
    const Smoothing& a = sm[e];
    const Smoothing& b = sm[e1];
    const auto& x = link.crossing(c);
    int ca = a.circle_of_edge[x[0]], cb = a.circle_of_edge[x[2]];
    int da = b.circle_of_edge[x[1]], db = b.circle_of_edge[x[3]];
    uint32_t base = 0;
    std::vector<bool> used(a.circles, false);
    for (int edge = 0; edge < link.num_edges(); ++edge) {
      int ci = a.circle_of_edge[edge];
      if (ci == ca || ci == cb || used[ci]) continue;
      used[ci] = true;
      if ((v >> ci) & 1u) base |= 1u << b.circle_of_edge[edge];
    }
    std::vector<uint32_t> out;
    auto bit = [](int i) { return 1u << i; };
    if (ca != cb) {  // merge: 1*1 = 1, 1*x = x, x*x = t
      int xa = (v >> ca) & 1u, xb = (v >> cb) & 1u;
      if (xa + xb == 0) out.push_back(base);
      else if (xa + xb == 1) out.push_back(base | bit(da));
      else if (t == 1) out.push_back(base);
    } else {  // split: D(1) = 1x + x1, D(x) = xx + t 11
      if (!((v >> ca) & 1u)) {
        out.push_back(base | bit(db));
        out.push_back(base | bit(da));
      } else {
        out.push_back(base | bit(da) | bit(db));
        if (t == 1) out.push_back(base);
      }
    }
    return out;
  };

  std::map<std::pair<int, int>, int> rank_out;
  for (const auto& [bk, gens] : blocks) {
    // Columns may land in several target blocks at t = 1 only.
    std::map<std::pair<int, int>, std::vector<std::vector<uint64_t>>> mats;
    for (size_t g = 0; g < gens.size(); ++g) {
      for (int c = 0; c < n; ++c) {
        if ((gens[g].state >> c) & 1u) continue;
        uint64_t e1 = gens[g].state | (uint64_t{1} << c);
        for (uint32_t v1 : image(gens[g].state, gens[g].v, c)) {
          auto [tbk, row] = where.at({e1, v1});
          if (t == 0 && tbk.second != bk.second)
            throw VerificationError("oracle differential changes the quantum degree");
          auto& m = mats[tbk];
          size_t words = (gens.size() + 63) / 64;
          if (m.empty()) m.assign(blocks.at(tbk).size(), std::vector<uint64_t>(words, 0));
          m[row][g / 64] ^= uint64_t{1} << (g % 64);
        }
      }
    }
    int r = 0;
    for (auto& [tbk, m] : mats) r += dense_rank(std::move(m));
    rank_out[bk] = r;
  }
  HomologyTable h;
  h.t = t;
  for (const auto& [bk, gens] : blocks) {
    int in = 0;
    if (auto it = rank_out.find({bk.first - 1, bk.second}); it != rank_out.end()) in = it->second;
    int dim = static_cast<int>(gens.size()) - rank_out[bk] - in;
    if (dim == 0) continue;
    if (t == 0) h.bigraded[bk] += dim;
    h.graded[bk.first] += dim;
  }
  return h;
}

// ---------------------------------------------------------------- Jones

namespace {

void add_into(LaurentPolynomial& acc, const LaurentPolynomial& p, long long sign, int shift) {
  for (auto [e, c] : p) {
    long long& slot = acc[e + shift];
    slot += sign * c;
    if (slot == 0) acc.erase(e + shift);
  }
}

LaurentPolynomial loop_power(int k) {
  LaurentPolynomial p{{0, 1}};
  for (int i = 0; i < k; ++i) {
    LaurentPolynomial next;
    add_into(next, p, 1, 1);
    add_into(next, p, 1, -1);
    p = std::move(next);
  }
  return p;
}

}  // namespace

// <D> = <D_0> - q <D_1>, with each loop contributing q + 1/q.
LaurentPolynomial jones_polynomial(const TangleDiagram& link) {
  if (!link.is_closed()) throw InputError("the Jones polynomial needs a closed diagram");
  auto [np, nm] = crossing_signs(link);
  int n = link.num_crossings();
  std::function<LaurentPolynomial(int, const UnionFind&)> bracket = [&](int c,
                                                                        const UnionFind& uf) {
    if (c == n) return loop_power(uf.count());
    const auto& x = link.crossing(c);
    UnionFind zero = uf, one = uf;
    zero.unite(x[0], x[1]);
    zero.unite(x[2], x[3]);
    one.unite(x[1], x[2]);
    one.unite(x[3], x[0]);
    LaurentPolynomial out = bracket(c + 1, zero);
    add_into(out, bracket(c + 1, one), -1, 1);
    return out;
  };
  LaurentPolynomial kb = bracket(0, UnionFind(link.num_edges()));
  LaurentPolynomial out;
  add_into(out, kb, nm % 2 ? -1 : 1, np - 2 * nm);
  return out;
}

LaurentPolynomial euler_characteristic(const HomologyTable& h) {
  if (h.t != 0) throw InputError("the graded Euler characteristic needs the t = 0 table");
  LaurentPolynomial p;
  for (const auto& [ij, dim] : h.bigraded) add_into(p, {{ij.second, dim}}, ij.first % 2 ? -1 : 1, 0);
  return p;
}

std::string format_polynomial(const LaurentPolynomial& p) {
  if (p.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto [e, c] : p) {
    long long mag = c < 0 ? -c : c;
    if (first) os << (c < 0 ? "-" : "");
    else os << (c < 0 ? " - " : " + ");
    first = false;
    if (mag != 1 || e == 0) os << mag;
    if (e != 0) os << "q" << (e != 1 ? "^" + std::to_string(e) : "");
  }
  return os.str();
}

// ---------------------------------------------------------------- output

std::string format_table(const HomologyTable& h) {
  std::vector<std::vector<std::string>> rows;
  if (h.t == 0)
    for (const auto& [ij, dim] : h.bigraded)
      rows.push_back({std::to_string(ij.first), std::to_string(ij.second), std::to_string(dim)});
  else
    for (const auto& [i, dim] : h.graded) rows.push_back({std::to_string(i), std::to_string(dim)});
  std::vector<size_t> width(h.t == 0 ? 3 : 2, 0);
  for (const auto& r : rows)
    for (size_t k = 0; k < r.size(); ++k) width[k] = std::max(width[k], r[k].size());
  std::ostringstream os;
  for (const auto& r : rows) {
    for (size_t k = 0; k < r.size(); ++k) {
      if (k) os << ' ';
      os << std::string(width[k] - r[k].size(), ' ') << r[k];
    }
    os << '\n';
  }
  return os.str();
}

std::string table_json(const HomologyTable& h) {
  nlohmann::json rows = nlohmann::json::array();
  if (h.t == 0)
    for (const auto& [ij, dim] : h.bigraded) rows.push_back({ij.first, ij.second, dim});
  else
    for (const auto& [i, dim] : h.graded) rows.push_back({i, dim});
  return nlohmann::json{{"t", h.t}, {"table", rows}}.dump();
}

}  // namespace khmut
