#pragma once

#include <string>
#include <vector>

#include "dynsindy/common.hpp"
#include "dynsindy/library.hpp"

namespace dynsindy {

/// Constant-in-time library coefficients: values(k, j) multiplies term k in
/// the equation for state j.
struct CoefficientMatrix {
  Matrix values;  // n_terms x d
  std::vector<std::string> term_names;

  Index n_terms() const { return values.rows(); }
  Index dim() const { return values.cols(); }
};

/// Time-varying library coefficients: one n_terms x d matrix per sample time.
/// Term ordering matches LibrarySpec; flattened layouts use index k*d + j.
struct CoefficientSeries {
  std::vector<Matrix> values;  // T entries of n_terms x d
  std::vector<std::string> term_names;
  Vector times;

  Index n_samples() const { return static_cast<Index>(values.size()); }
  Index n_terms() const { return values.empty() ? 0 : values.front().rows(); }
  Index dim() const { return values.empty() ? 0 : values.front().cols(); }

  /// Time series of one coefficient.
  Vector entry_series(Index term, Index equation) const {
    Vector out(n_samples());
    for (Index t = 0; t < n_samples(); ++t) out[t] = values[static_cast<std::size_t>(t)](term, equation);
    return out;
  }

  /// T x (n_terms*d) flattening, row t = vec of values[t] with k*d+j layout.
  Matrix flattened() const {
    const Index T = n_samples();
    Matrix out(T, n_terms() * dim());
    for (Index t = 0; t < T; ++t) {
      const Matrix& m = values[static_cast<std::size_t>(t)];
      for (Index k = 0; k < m.rows(); ++k) {
        for (Index j = 0; j < m.cols(); ++j) out(t, k * m.cols() + j) = m(k, j);
      }
    }
    return out;
  }
};

inline CoefficientSeries make_constant_series(const CoefficientMatrix& coeffs, const Vector& times) {
  CoefficientSeries s;
  s.term_names = coeffs.term_names;
  s.times = times;
  s.values.assign(static_cast<std::size_t>(times.size()), coeffs.values);
  return s;
}

/// Boolean support pattern: true where any time sample is nonzero.
inline BoolMatrix support_mask(const CoefficientSeries& series) {
  BoolMatrix mask = BoolMatrix::Constant(series.n_terms(), series.dim(), false);
  for (const auto& m : series.values) mask = mask || (m.array() != 0.0);
  return mask;
}

inline BoolMatrix support_mask(const CoefficientMatrix& coeffs) {
  return coeffs.values.array() != 0.0;
}

}  // namespace dynsindy
