#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dynsindy/common.hpp"

namespace dynsindy::ad {

// Reverse-mode engine over dense matrices. Ops record themselves on a
// thread-local tape whenever an input requires gradients; backward() walks
// the tape in reverse and then clears it. One tape per thread, so independent
// trainers can run concurrently.

struct Node {
  Matrix value;
  Matrix grad;  // empty until something flows back
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(const Node&)> backprop;  // scatter node.grad into parents
};

namespace detail {

inline std::vector<std::shared_ptr<Node>>& tape() {
  thread_local std::vector<std::shared_ptr<Node>> t;
  return t;
}

inline bool& recording_flag() {
  thread_local bool enabled = true;
  return enabled;
}

inline void accumulate(Node& n, const Matrix& g) {
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

}  // namespace detail

/// Disables tape recording within a scope (evaluation-only forward passes).
class NoGradGuard {
 public:
  NoGradGuard() : previous_(detail::recording_flag()) { detail::recording_flag() = false; }
  ~NoGradGuard() { detail::recording_flag() = previous_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Var leaf(Matrix value, bool requires_grad = true) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    node->requires_grad = requires_grad;
    return Var(std::move(node));
  }

  static Var constant(Matrix value) { return leaf(std::move(value), false); }

  static Var scalar(double v, bool requires_grad = false) {
    return leaf(Matrix::Constant(1, 1, v), requires_grad);
  }

  const Matrix& value() const { return node_->value; }
  Matrix& value() { return node_->value; }
  const Matrix& grad() const { return node_->grad; }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  void zero_grad() { node_->grad.resize(0, 0); }
  double scalar_value() const {
    if (node_->value.size() != 1) throw std::invalid_argument("scalar_value: not a 1x1 tensor");
    return node_->value(0, 0);
  }

  std::shared_ptr<Node> node() const { return node_; }
  explicit operator bool() const { return static_cast<bool>(node_); }

 private:
  std::shared_ptr<Node> node_;
};

namespace detail {

inline Var make_op(Matrix value, std::vector<Var> inputs, std::function<void(const Node&)> backprop) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  for (const auto& in : inputs) {
    node->requires_grad = node->requires_grad || in.requires_grad();
    node->parents.push_back(in.node());
  }
  if (node->requires_grad && recording_flag()) {
    node->backprop = std::move(backprop);
    tape().push_back(node);
  }
  return Var(node);
}

inline void check_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.value().rows() != b.value().rows() || a.value().cols() != b.value().cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

inline Matrix reshape_row_major(const Matrix& a, Index rows, Index cols) {
  if (a.size() != rows * cols) throw std::invalid_argument("reshape: element count mismatch");
  Matrix out(rows, cols);
  Index idx = 0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j, ++idx) out(idx / cols, idx % cols) = a(i, j);
  }
  return out;
}

}  // namespace detail

inline Var add(const Var& a, const Var& b) {
  detail::check_same_shape(a, b, "add");
  return detail::make_op(a.value() + b.value(), {a, b}, [](const Node& n) {
    detail::accumulate(*n.parents[0], n.grad);
    detail::accumulate(*n.parents[1], n.grad);
  });
}

inline Var sub(const Var& a, const Var& b) {
  detail::check_same_shape(a, b, "sub");
  return detail::make_op(a.value() - b.value(), {a, b}, [](const Node& n) {
    detail::accumulate(*n.parents[0], n.grad);
    detail::accumulate(*n.parents[1], -n.grad);
  });
}

inline Var mul(const Var& a, const Var& b) {
  detail::check_same_shape(a, b, "mul");
  return detail::make_op(a.value().cwiseProduct(b.value()), {a, b}, [](const Node& n) {
    detail::accumulate(*n.parents[0], n.grad.cwiseProduct(n.parents[1]->value));
    detail::accumulate(*n.parents[1], n.grad.cwiseProduct(n.parents[0]->value));
  });
}

inline Var div(const Var& a, const Var& b) {
  detail::check_same_shape(a, b, "div");
  return detail::make_op(a.value().cwiseQuotient(b.value()), {a, b}, [](const Node& n) {
    const Matrix& bv = n.parents[1]->value;
    detail::accumulate(*n.parents[0], n.grad.cwiseQuotient(bv));
    detail::accumulate(*n.parents[1],
                       -n.grad.cwiseProduct(n.parents[0]->value).cwiseQuotient(bv.cwiseProduct(bv)));
  });
}

inline Var scale(const Var& a, double c) {
  return detail::make_op(c * a.value(), {a}, [c](const Node& n) {
    detail::accumulate(*n.parents[0], c * n.grad);
  });
}

inline Var add_scalar(const Var& a, double c) {
  return detail::make_op(a.value().array() + c, {a}, [](const Node& n) {
    detail::accumulate(*n.parents[0], n.grad);
  });
}

inline Var matmul(const Var& a, const Var& b) {
  if (a.value().cols() != b.value().rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
  return detail::make_op(a.value() * b.value(), {a, b}, [](const Node& n) {
    detail::accumulate(*n.parents[0], n.grad * n.parents[1]->value.transpose());
    detail::accumulate(*n.parents[1], n.parents[0]->value.transpose() * n.grad);
  });
}

/// Broadcast add of a 1 x M row (bias) onto every row of an N x M matrix.
inline Var add_rowvec(const Var& a, const Var& row) {
  if (row.value().rows() != 1 || row.value().cols() != a.value().cols()) {
    throw std::invalid_argument("add_rowvec: row shape mismatch");
  }
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  return detail::make_op(std::move(out), {a, row}, [](const Node& n) {
    detail::accumulate(*n.parents[0], n.grad);
    detail::accumulate(*n.parents[1], n.grad.colwise().sum());
  });
}

/// Broadcast multiply by a constant row (masking); the row carries no grad.
inline Var mul_rowvec(const Var& a, const RowVector& row) {
  if (row.size() != a.value().cols()) throw std::invalid_argument("mul_rowvec: row shape mismatch");
  Matrix out = a.value();
  out.array().rowwise() *= row.array();
  RowVector r = row;
  return detail::make_op(std::move(out), {a}, [r](const Node& n) {
    Matrix g = n.grad;
    g.array().rowwise() *= r.array();
    detail::accumulate(*n.parents[0], g);
  });
}

inline Var exp(const Var& a) {
  Matrix out = a.value().array().exp();
  return detail::make_op(out, {a}, [out](const Node& n) {
    detail::accumulate(*n.parents[0], n.grad.cwiseProduct(out));
  });
}

inline Var log(const Var& a) {
  return detail::make_op(a.value().array().log(), {a}, [](const Node& n) {
    detail::accumulate(*n.parents[0], n.grad.cwiseQuotient(n.parents[0]->value));
  });
}

inline Var tanh(const Var& a) {
  Matrix out = a.value().array().tanh();
  return detail::make_op(out, {a}, [out](const Node& n) {
    detail::accumulate(*n.parents[0], n.grad.cwiseProduct((1.0 - out.array().square()).matrix()));
  });
}

inline Var relu(const Var& a) {
  return detail::make_op(a.value().cwiseMax(0.0), {a}, [](const Node& n) {
    const Matrix mask = (n.parents[0]->value.array() > 0.0).cast<double>();
    detail::accumulate(*n.parents[0], n.grad.cwiseProduct(mask));
  });
}

inline Var elu(const Var& a) {
  Matrix out = a.value().unaryExpr([](double x) { return x > 0.0 ? x : std::expm1(x); });
  return detail::make_op(out, {a}, [out](const Node& n) {
    const Matrix slope = out.binaryExpr(n.parents[0]->value, [](double y, double x) {
      return x > 0.0 ? 1.0 : y + 1.0;  // d/dx (e^x - 1) = e^x = y + 1
    });
    detail::accumulate(*n.parents[0], n.grad.cwiseProduct(slope));
  });
}

inline Var sigmoid(const Var& a) {
  Matrix out = a.value().unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
  return detail::make_op(out, {a}, [out](const Node& n) {
    detail::accumulate(*n.parents[0], n.grad.cwiseProduct((out.array() * (1.0 - out.array())).matrix()));
  });
}

inline Var abs(const Var& a) {
  return detail::make_op(a.value().cwiseAbs(), {a}, [](const Node& n) {
    const Matrix sign = n.parents[0]->value.unaryExpr([](double x) {
      return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    });
    detail::accumulate(*n.parents[0], n.grad.cwiseProduct(sign));
  });
}

inline Var sum(const Var& a) {
  return detail::make_op(Matrix::Constant(1, 1, a.value().sum()), {a}, [](const Node& n) {
    detail::accumulate(*n.parents[0],
                       Matrix::Constant(n.parents[0]->value.rows(), n.parents[0]->value.cols(), n.grad(0, 0)));
  });
}

inline Var mean(const Var& a) {
  const double inv_n = 1.0 / static_cast<double>(a.value().size());
  return detail::make_op(Matrix::Constant(1, 1, a.value().mean()), {a}, [inv_n](const Node& n) {
    detail::accumulate(*n.parents[0],
                       Matrix::Constant(n.parents[0]->value.rows(), n.parents[0]->value.cols(),
                                        n.grad(0, 0) * inv_n));
  });
}

/// Row-wise sum: N x M -> N x 1.
inline Var row_sum(const Var& a) {
  return detail::make_op(a.value().rowwise().sum(), {a}, [](const Node& n) {
    detail::accumulate(*n.parents[0], n.grad * RowVector::Ones(n.parents[0]->value.cols()));
  });
}

/// Row-major logical reshape.
inline Var reshape(const Var& a, Index rows, Index cols) {
  return detail::make_op(detail::reshape_row_major(a.value(), rows, cols), {a}, [](const Node& n) {
    detail::accumulate(*n.parents[0],
                       detail::reshape_row_major(n.grad, n.parents[0]->value.rows(), n.parents[0]->value.cols()));
  });
}

inline Var concat_cols(const Var& a, const Var& b) {
  if (a.value().rows() != b.value().rows()) throw std::invalid_argument("concat_cols: row count mismatch");
  Matrix out(a.value().rows(), a.value().cols() + b.value().cols());
  out << a.value(), b.value();
  const Index na = a.value().cols();
  return detail::make_op(std::move(out), {a, b}, [na](const Node& n) {
    detail::accumulate(*n.parents[0], n.grad.leftCols(na));
    detail::accumulate(*n.parents[1], n.grad.rightCols(n.grad.cols() - na));
  });
}

inline Var slice_rows(const Var& a, Index begin, Index count) {
  if (begin < 0 || begin + count > a.value().rows()) throw std::invalid_argument("slice_rows: out of range");
  return detail::make_op(a.value().middleRows(begin, count), {a}, [begin, count](const Node& n) {
    Matrix g = Matrix::Zero(n.parents[0]->value.rows(), n.parents[0]->value.cols());
    g.middleRows(begin, count) = n.grad;
    detail::accumulate(*n.parents[0], g);
  });
}

inline Var slice_cols(const Var& a, Index begin, Index count) {
  if (begin < 0 || begin + count > a.value().cols()) throw std::invalid_argument("slice_cols: out of range");
  return detail::make_op(a.value().middleCols(begin, count), {a}, [begin, count](const Node& n) {
    Matrix g = Matrix::Zero(n.parents[0]->value.rows(), n.parents[0]->value.cols());
    g.middleCols(begin, count) = n.grad;
    detail::accumulate(*n.parents[0], g);
  });
}

/// Columns offset, offset+stride, ... (count of them); picks one equation's
/// coefficients out of a term-major flattened series.
inline Var stride_cols(const Var& a, Index offset, Index stride, Index count) {
  if (offset < 0 || stride < 1 || offset + (count - 1) * stride >= a.value().cols()) {
    throw std::invalid_argument("stride_cols: out of range");
  }
  Matrix out(a.value().rows(), count);
  for (Index c = 0; c < count; ++c) out.col(c) = a.value().col(offset + c * stride);
  return detail::make_op(std::move(out), {a}, [offset, stride, count](const Node& n) {
    Matrix g = Matrix::Zero(n.parents[0]->value.rows(), n.parents[0]->value.cols());
    for (Index c = 0; c < count; ++c) g.col(offset + c * stride) = n.grad.col(c);
    detail::accumulate(*n.parents[0], g);
  });
}

/// Rows 1..N-1 minus rows 0..N-2 (discrete time increments).
inline Var rows_diff(const Var& a) {
  const Index n = a.value().rows();
  if (n < 2) throw std::invalid_argument("rows_diff: need at least two rows");
  return detail::make_op(a.value().bottomRows(n - 1) - a.value().topRows(n - 1), {a}, [n](const Node& n_) {
    Matrix g = Matrix::Zero(n, n_.parents[0]->value.cols());
    g.bottomRows(n - 1) += n_.grad;
    g.topRows(n - 1) -= n_.grad;
    detail::accumulate(*n_.parents[0], g);
  });
}

/// Reverse pass from a scalar loss; fills `grad` on every reachable
/// requires_grad node and clears the tape.
inline void backward(const Var& loss) {
  if (loss.value().size() != 1) {
    detail::tape().clear();
    throw std::invalid_argument("backward: loss must be a 1x1 tensor");
  }
  auto& t = detail::tape();
  loss.node()->grad = Matrix::Constant(1, 1, 1.0);
  for (auto it = t.rbegin(); it != t.rend(); ++it) {
    Node& n = **it;
    if (n.grad.size() == 0 || !n.backprop) continue;
    n.backprop(n);
  }
  t.clear();
}

inline std::size_t tape_size() { return detail::tape().size(); }
inline void clear_tape() { detail::tape().clear(); }

}  // namespace dynsindy::ad
