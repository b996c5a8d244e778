#ifndef VNEAP_NN_HPP_
#define VNEAP_NN_HPP_

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace vneap {

/// Row-major real matrix: rows are entities, columns are features.
struct Tensor2 {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor2() = default;
  Tensor2(int r, int c, double fill = 0.0);
  /// Nested rows; all rows must have the same length.
  Tensor2(std::initializer_list<std::initializer_list<double>> values);
  static Tensor2 row(std::vector<double> values);

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }
  std::string shape_string() const;
  bool all_finite() const;

  friend bool operator==(const Tensor2&, const Tensor2&) = default;
};

/// Reverse-mode tape. Every op records its output; backward() walks the
/// tape in reverse and accumulates into the gradient buffers bound with
/// param(). The tape keeps pointers to bound parameters, so they must
/// outlive it.
class Graph {
 public:
  using Var = int;

  /// Constant input (receives no gradient outside the tape).
  Var input(Tensor2 value);
  /// Leaf bound to a parameter block; backward adds into *grad.
  Var param(const Tensor2& value, Tensor2* grad);

  Var matmul(Var a, Var b);
  /// x + bias broadcast over rows (bias is 1 x cols).
  Var add_row(Var x, Var bias);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // element-wise
  Var scale(Var a, double s);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var concat_cols(Var a, Var b);
  /// 1 x c row repeated into n x c.
  Var broadcast_rows(Var row, int n);
  /// Per column (mean_i max(H_ic, eps)^p)^(1/p) with p = 1 + softplus(theta);
  /// theta is 1 x 1. Entries below eps get zero gradient.
  Var gem(Var h, Var theta, double eps = 1e-6);
  /// Rows `rows` of h, in that order.
  Var select_rows(Var h, const std::vector<int>& rows);
  /// n x c into 1 x (n*c), row-major.
  Var flatten(Var h);
  /// Log-softmax of a 1 x A row over the entries where mask != 0; masked
  /// entries are -inf and receive no gradient. Throws when nothing is legal.
  Var masked_log_softmax(Var logits, const std::vector<char>& mask);
  /// Sum of all entries, 1 x 1.
  Var sum(Var a);

  const Tensor2& value(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  /// d loss / d everything for a 1 x 1 loss.
  void backward(Var loss);
  /// Seeds several outputs at once (vector-Jacobian products).
  void backward(const std::vector<std::pair<Var, Tensor2>>& seeds);

 private:
  enum class Op {
    kInput, kParam, kMatmul, kAddRow, kAdd, kSub, kMul, kScale, kTanh, kSigmoid,
    kConcat, kBroadcast, kGem, kFlatten, kLogSoftmax, kSum, kSelectRows
  };
  struct Node {
    explicit Node(Op o, Var x = -1, Var y = -1) : op(o), a(x), b(y) {}
    Op op;
    Var a, b;
    Tensor2 value;
    Tensor2* param_grad = nullptr;
    double scalar = 0.0;        // scale factor, gem eps
    std::vector<char> mask;     // log-softmax
    std::vector<double> aux;    // gem: per-column mean of clamped^p
    std::vector<int> rows;      // select_rows
  };
  Var push(Node n);
  const Node& at(Var v) const;

  std::vector<Node> nodes_;
};

double softplus(double x);
double gem_mean_power(const Tensor2& h, int column, double p, double eps);
/// Inverse of softplus for y > 0.
double softplus_inverse(double y);

}  // namespace vneap

#endif  // VNEAP_NN_HPP_
