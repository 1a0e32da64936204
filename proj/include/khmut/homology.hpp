#pragma once

#include <map>
#include <string>
#include <vector>

#include "khmut/bracket.hpp"

namespace khmut {

// Poincare table over F_2: (i, j) -> dim at t = 0, i -> dim at t = 1.
struct HomologyTable {
  int t = 0;
  std::map<std::pair<int, int>, int> bigraded;
  std::map<int, int> graded;

  int total() const;
  bool operator==(const HomologyTable&) const = default;
};

// q-degrees of the dotting basis of Hom(empty, O); basis element s dots
// circle i iff bit (k - 1 - i) of s is set.
std::vector<int> hom_from_empty(const CobObject& o);

// Matrices of post-composition on dotting bases, at t = 0 or t = 1.
ScalarComplex linearize(const Complex& c, int t);
// The same matrices computed by composing each entry with each basis cobordism.
ScalarComplex linearize_by_composition(const Complex& c, int t);

HomologyTable f2_homology(const ScalarComplex& c, int t);
HomologyTable khovanov_homology(const TangleDiagram& link, int t, bool simplify = false,
                                int jobs = 0);
HomologyTable complex_homology(const Complex& closed, int t, bool simplify = false);

// Independent cube state sum over F_2[x]/(x^2 - t).
HomologyTable oracle_state_sum(const TangleDiagram& link, int t);

using LaurentPolynomial = std::map<int, long long>;  // exponent of q -> coefficient
// Unnormalized Jones polynomial from the Kauffman bracket; unknot = q + 1/q.
LaurentPolynomial jones_polynomial(const TangleDiagram& link);
LaurentPolynomial euler_characteristic(const HomologyTable& h);
std::string format_polynomial(const LaurentPolynomial& p);

std::string format_table(const HomologyTable& h);
std::string table_json(const HomologyTable& h);

}  // namespace khmut
