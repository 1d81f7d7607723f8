#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynsindy/common.hpp"

namespace dynsindy {

/// Candidate-function dictionary: polynomial monomials of the state up to
/// `degree`, optionally restricted to a subset of the state variables.
///
/// Term ordering is a stable public contract:
///   bias (if enabled), then all monomials of total degree 1, 2, ... degree,
///   each degree block in lexicographic order of its non-decreasing variable
///   index tuple. For d=2, degree=3 with bias:
///   [1, x0, x1, x0^2, x0*x1, x1^2, x0^3, x0^2*x1, x0*x1^2, x1^3]
struct LibrarySpec {
  int degree = 3;
  bool include_bias = true;
  std::optional<std::vector<int>> variable_subset;  // indices into the state vector
};

/// A monomial as a non-decreasing list of variable indices; empty = bias term.
using Monomial = std::vector<int>;

inline void validate(const LibrarySpec& spec, int state_dim) {
  if (spec.degree < 1 || spec.degree > 3) throw std::invalid_argument("library degree must be in [1,3]");
  if (spec.variable_subset) {
    if (spec.variable_subset->empty()) throw std::invalid_argument("variable_subset must not be empty");
    for (int v : *spec.variable_subset) {
      if (v < 0 || v >= state_dim) throw std::invalid_argument("variable_subset index out of range");
    }
  }
}

inline std::vector<Monomial> library_terms(const LibrarySpec& spec, int state_dim) {
  validate(spec, state_dim);
  std::vector<int> vars;
  if (spec.variable_subset) {
    vars = *spec.variable_subset;
  } else {
    vars.resize(static_cast<std::size_t>(state_dim));
    for (int i = 0; i < state_dim; ++i) vars[static_cast<std::size_t>(i)] = i;
  }

  std::vector<Monomial> terms;
  if (spec.include_bias) terms.push_back({});

  // Non-decreasing tuples over `vars` of each total degree, lexicographic.
  for (int deg = 1; deg <= spec.degree; ++deg) {
    std::vector<std::size_t> pick(static_cast<std::size_t>(deg), 0);
    while (true) {
      Monomial m(static_cast<std::size_t>(deg));
      for (int k = 0; k < deg; ++k) m[static_cast<std::size_t>(k)] = vars[pick[static_cast<std::size_t>(k)]];
      terms.push_back(std::move(m));
      int pos = deg - 1;
      while (pos >= 0 && pick[static_cast<std::size_t>(pos)] + 1 == vars.size()) --pos;
      if (pos < 0) break;
      const std::size_t next = pick[static_cast<std::size_t>(pos)] + 1;
      for (int k = pos; k < deg; ++k) pick[static_cast<std::size_t>(k)] = next;
    }
  }
  return terms;
}

inline std::string monomial_name(const Monomial& m) {
  if (m.empty()) return "1";
  std::string name;
  std::size_t i = 0;
  while (i < m.size()) {
    std::size_t j = i;
    while (j < m.size() && m[j] == m[i]) ++j;
    if (!name.empty()) name += "*";
    name += "x" + std::to_string(m[i]);
    if (j - i > 1) name += "^" + std::to_string(j - i);
    i = j;
  }
  return name;
}

inline std::vector<std::string> term_names(const LibrarySpec& spec, int state_dim) {
  std::vector<std::string> names;
  for (const auto& m : library_terms(spec, state_dim)) names.push_back(monomial_name(m));
  return names;
}

inline Index term_count(const LibrarySpec& spec, int state_dim) {
  return static_cast<Index>(library_terms(spec, state_dim).size());
}

inline double eval_monomial(const Monomial& m, const RowVector& state) {
  double v = 1.0;
  for (int idx : m) v *= state[idx];
  return v;
}

/// Evaluates the dictionary on a batch of states: rows of `states` are state
/// snapshots, columns of the result follow the fixed term ordering.
inline Matrix build_library(const Eigen::Ref<const Matrix>& states, const LibrarySpec& spec) {
  const auto terms = library_terms(spec, static_cast<int>(states.cols()));
  Matrix theta(states.rows(), static_cast<Index>(terms.size()));
  for (std::size_t c = 0; c < terms.size(); ++c) {
    const auto& m = terms[c];
    if (m.empty()) {
      theta.col(static_cast<Index>(c)).setOnes();
      continue;
    }
    Vector col = states.col(m[0]);
    for (std::size_t k = 1; k < m.size(); ++k) col.array() *= states.col(m[k]).array();
    theta.col(static_cast<Index>(c)) = col;
  }
  return theta;
}

/// Ratio s_j / prod(s_v for v in m): converts a coefficient fitted on
/// per-dimension max-abs normalized data back to raw units for equation j.
inline double rescale_factor(const Monomial& m, Index equation, const Vector& scale) {
  double denom = 1.0;
  for (int v : m) denom *= scale[v];
  return scale[equation] / denom;
}

}  // namespace dynsindy
