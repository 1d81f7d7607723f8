#pragma once

#include <string>
#include <vector>

#include "dynsindy/coefficients.hpp"
#include "dynsindy/common.hpp"
#include "dynsindy/library.hpp"

namespace dynsindy {

namespace detail {

/// Least squares restricted to the active columns of theta, via column-pivoted
/// QR. Throws RankDeficiencyError when the active set is effectively singular.
inline Vector active_set_solve(const Eigen::Ref<const Matrix>& theta, const Eigen::Ref<const Vector>& target,
                               const std::vector<Index>& active) {
  Matrix sub(theta.rows(), static_cast<Index>(active.size()));
  for (std::size_t c = 0; c < active.size(); ++c) sub.col(static_cast<Index>(c)) = theta.col(active[c]);
  Eigen::ColPivHouseholderQR<Matrix> qr(sub);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Index>(active.size())) {
    throw RankDeficiencyError("active-set least squares is rank deficient (" +
                              std::to_string(qr.rank()) + " of " + std::to_string(active.size()) + ")");
  }
  return qr.solve(target);
}

}  // namespace detail

/// Sequential thresholded least squares, fitted per equation (column of
/// `derivatives`). Alternates a QR least-squares solve on the active set with
/// hard pruning of coefficients strictly below `threshold` until the support
/// stabilizes or `max_iters` is reached. Ties at the threshold are retained.
inline CoefficientMatrix stlsq(const Eigen::Ref<const Matrix>& library,
                               const Eigen::Ref<const Matrix>& derivatives, double threshold,
                               int max_iters = 20, std::vector<std::string> term_names = {}) {
  const Index n_terms = library.cols();
  const Index d = derivatives.cols();
  if (library.rows() != derivatives.rows()) throw std::invalid_argument("stlsq: row count mismatch");
  if (library.rows() < n_terms) throw std::invalid_argument("stlsq: need at least n_terms samples");
  if (threshold < 0) throw std::invalid_argument("stlsq: threshold must be >= 0");

  CoefficientMatrix out;
  out.values = Matrix::Zero(n_terms, d);
  out.term_names = std::move(term_names);

  for (Index j = 0; j < d; ++j) {
    std::vector<Index> active(static_cast<std::size_t>(n_terms));
    for (Index k = 0; k < n_terms; ++k) active[static_cast<std::size_t>(k)] = k;

    Vector coeffs;
    bool converged = false;
    for (int iter = 0; iter < max_iters && !active.empty(); ++iter) {
      coeffs = detail::active_set_solve(library, derivatives.col(j), active);
      std::vector<Index> kept;
      for (std::size_t c = 0; c < active.size(); ++c) {
        if (std::abs(coeffs[static_cast<Index>(c)]) >= threshold) kept.push_back(active[c]);
      }
      if (kept.size() == active.size()) {
        converged = true;
        break;
      }
      active = std::move(kept);
    }
    if (!active.empty() && !converged) coeffs = detail::active_set_solve(library, derivatives.col(j), active);
    for (std::size_t c = 0; c < active.size(); ++c) out.values(active[c], j) = coeffs[static_cast<Index>(c)];
  }
  return out;
}

/// One-step model output: derivative of each state from a library row and the
/// coefficients in force at that instant.
inline Vector predict_derivative(const Eigen::Ref<const RowVector>& library_row,
                                 const Eigen::Ref<const Matrix>& coeffs_at_t) {
  if (library_row.size() != coeffs_at_t.rows()) throw std::invalid_argument("predict_derivative: shape mismatch");
  return coeffs_at_t.transpose() * library_row.transpose();
}

}  // namespace dynsindy
