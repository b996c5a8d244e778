#include "vneap/nn.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "vneap/error.hpp"

namespace vneap {

Tensor2::Tensor2(int r, int c, double fill)
    : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {
  if (r < 0 || c < 0) throw ShapeError("negative tensor shape");
}

Tensor2::Tensor2(std::initializer_list<std::initializer_list<double>> values) {
  rows = static_cast<int>(values.size());
  cols = rows ? static_cast<int>(values.begin()->size()) : 0;
  for (const auto& r : values) {
    if (static_cast<int>(r.size()) != cols) throw ShapeError("ragged tensor literal");
    data.insert(data.end(), r.begin(), r.end());
  }
}

Tensor2 Tensor2::row(std::vector<double> values) {
  Tensor2 t;
  t.rows = 1;
  t.cols = static_cast<int>(values.size());
  t.data = std::move(values);
  return t;
}

std::string Tensor2::shape_string() const {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

bool Tensor2::all_finite() const {
  return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

double softplus(double x) { return x > 30 ? x : std::log1p(std::exp(x)); }

double softplus_inverse(double y) { return y > 30 ? y : std::log(std::expm1(y)); }

namespace {

double sigmoid_scalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void require(bool ok, const char* op, const Tensor2& a, const Tensor2& b) {
  if (!ok)
    throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " +
                     b.shape_string());
}

}  // namespace

// Mean of max(H_ic, eps)^p over rows, summed in ascending order so the
// result is exactly invariant under row permutations.
double gem_mean_power(const Tensor2& h, int c, double p, double eps) {
  std::vector<double> terms(h.rows);
  for (int i = 0; i < h.rows; ++i) terms[i] = std::pow(std::max(h(i, c), eps), p);
  std::sort(terms.begin(), terms.end());
  double m = 0.0;
  for (double t : terms) m += t;
  return m / h.rows;
}

namespace {

void add_into(Tensor2& dst, const Tensor2& src) {
  if (dst.size() == 0) {
    dst = src;
    return;
  }
  for (std::size_t k = 0; k < dst.size(); ++k) dst.data[k] += src.data[k];
}

}  // namespace

Graph::Var Graph::push(Node n) {
#ifndef NDEBUG
  if (n.op != Op::kLogSoftmax) assert(n.value.all_finite());
#endif
  nodes_.push_back(std::move(n));
  return static_cast<Var>(nodes_.size() - 1);
}

const Graph::Node& Graph::at(Var v) const {
  if (v < 0 || static_cast<std::size_t>(v) >= nodes_.size())
    throw InvariantError("graph variable " + std::to_string(v) + " was never recorded");
  return nodes_[v];
}

const Tensor2& Graph::value(Var v) const { return at(v).value; }

Graph::Var Graph::input(Tensor2 value) {
  Node n(Op::kInput);
  n.value = std::move(value);
  return push(std::move(n));
}

Graph::Var Graph::param(const Tensor2& value, Tensor2* grad) {
  if (grad && !grad->same_shape(value))
    throw ShapeError("gradient buffer " + grad->shape_string() + " does not match parameter " +
                     value.shape_string());
  Node n(Op::kParam);
  n.value = value;
  n.param_grad = grad;
  return push(std::move(n));
}

Graph::Var Graph::matmul(Var a, Var b) {
  const Tensor2 &A = at(a).value, &B = at(b).value;
  require(A.cols == B.rows, "matmul", A, B);
  Node n(Op::kMatmul, a, b);
  n.value = Tensor2(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      const double aik = A(i, k);
      if (aik == 0.0) continue;
      const double* brow = &B.data[static_cast<std::size_t>(k) * B.cols];
      double* out = &n.value.data[static_cast<std::size_t>(i) * B.cols];
      for (int j = 0; j < B.cols; ++j) out[j] += aik * brow[j];
    }
  return push(std::move(n));
}

Graph::Var Graph::add_row(Var x, Var bias) {
  const Tensor2 &X = at(x).value, &b = at(bias).value;
  require(b.rows == 1 && b.cols == X.cols, "add_row", X, b);
  Node n(Op::kAddRow, x, bias);
  n.value = X;
  for (int i = 0; i < X.rows; ++i)
    for (int j = 0; j < X.cols; ++j) n.value(i, j) += b(0, j);
  return push(std::move(n));
}

Graph::Var Graph::add(Var a, Var b) {
  const Tensor2 &A = at(a).value, &B = at(b).value;
  require(A.same_shape(B), "add", A, B);
  Node n(Op::kAdd, a, b);
  n.value = A;
  for (std::size_t k = 0; k < A.size(); ++k) n.value.data[k] += B.data[k];
  return push(std::move(n));
}

Graph::Var Graph::sub(Var a, Var b) {
  const Tensor2 &A = at(a).value, &B = at(b).value;
  require(A.same_shape(B), "sub", A, B);
  Node n(Op::kSub, a, b);
  n.value = A;
  for (std::size_t k = 0; k < A.size(); ++k) n.value.data[k] -= B.data[k];
  return push(std::move(n));
}

Graph::Var Graph::mul(Var a, Var b) {
  const Tensor2 &A = at(a).value, &B = at(b).value;
  require(A.same_shape(B), "mul", A, B);
  Node n(Op::kMul, a, b);
  n.value = A;
  for (std::size_t k = 0; k < A.size(); ++k) n.value.data[k] *= B.data[k];
  return push(std::move(n));
}

Graph::Var Graph::scale(Var a, double s) {
  Node n(Op::kScale, a);
  n.value = at(a).value;
  n.scalar = s;
  for (double& v : n.value.data) v *= s;
  return push(std::move(n));
}

Graph::Var Graph::tanh(Var a) {
  Node n(Op::kTanh, a);
  n.value = at(a).value;
  for (double& v : n.value.data) v = std::tanh(v);
  return push(std::move(n));
}

Graph::Var Graph::sigmoid(Var a) {
  Node n(Op::kSigmoid, a);
  n.value = at(a).value;
  for (double& v : n.value.data) v = sigmoid_scalar(v);
  return push(std::move(n));
}

Graph::Var Graph::concat_cols(Var a, Var b) {
  const Tensor2 &A = at(a).value, &B = at(b).value;
  require(A.rows == B.rows, "concat_cols", A, B);
  Node n(Op::kConcat, a, b);
  n.value = Tensor2(A.rows, A.cols + B.cols);
  for (int i = 0; i < A.rows; ++i) {
    std::copy_n(&A.data[static_cast<std::size_t>(i) * A.cols], A.cols, &n.value(i, 0));
    std::copy_n(&B.data[static_cast<std::size_t>(i) * B.cols], B.cols, &n.value(i, 0) + A.cols);
  }
  return push(std::move(n));
}

Graph::Var Graph::broadcast_rows(Var row, int rows) {
  const Tensor2& R = at(row).value;
  if (R.rows != 1) throw ShapeError("broadcast_rows: expected a row, got " + R.shape_string());
  Node n(Op::kBroadcast, row);
  n.value = Tensor2(rows, R.cols);
  for (int i = 0; i < rows; ++i) std::copy(R.data.begin(), R.data.end(), &n.value(i, 0));
  return push(std::move(n));
}

Graph::Var Graph::gem(Var h, Var theta, double eps) {
  const Tensor2 &H = at(h).value, &T = at(theta).value;
  if (T.rows != 1 || T.cols != 1) throw ShapeError("gem: exponent must be 1x1");
  if (H.rows == 0) throw ShapeError("gem: no rows to pool");
  const double p = 1.0 + softplus(T(0, 0));
  Node n(Op::kGem, h, theta);
  n.scalar = eps;
  n.value = Tensor2(1, H.cols);
  n.aux.assign(H.cols, 0.0);
  for (int c = 0; c < H.cols; ++c) {
    const double m = gem_mean_power(H, c, p, eps);
    n.aux[c] = m;
    n.value(0, c) = std::pow(m, 1.0 / p);
  }
  return push(std::move(n));
}

Graph::Var Graph::select_rows(Var h, const std::vector<int>& rows) {
  const Tensor2& H = at(h).value;
  Node n(Op::kSelectRows, h);
  n.rows = rows;
  n.value = Tensor2(static_cast<int>(rows.size()), H.cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= H.rows) throw ShapeError("select_rows: row out of range");
    std::copy_n(&H.data[static_cast<std::size_t>(rows[r]) * H.cols], H.cols,
                &n.value(static_cast<int>(r), 0));
  }
  return push(std::move(n));
}

Graph::Var Graph::flatten(Var h) {
  Node n(Op::kFlatten, h);
  n.value = at(h).value;
  n.value.cols = n.value.rows * n.value.cols;
  n.value.rows = 1;
  return push(std::move(n));
}

Graph::Var Graph::masked_log_softmax(Var logits, const std::vector<char>& mask) {
  const Tensor2& L = at(logits).value;
  if (L.rows != 1 || static_cast<int>(mask.size()) != L.cols)
    throw ShapeError("masked_log_softmax: logits " + L.shape_string() + " with mask of " +
                     std::to_string(mask.size()));
  double mx = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < L.cols; ++j)
    if (mask[j]) mx = std::max(mx, L(0, j));
  if (!std::isfinite(mx)) throw InvalidArgument("masked_log_softmax: every action is masked");
  double z = 0.0;
  for (int j = 0; j < L.cols; ++j)
    if (mask[j]) z += std::exp(L(0, j) - mx);
  const double lse = mx + std::log(z);
  Node n(Op::kLogSoftmax, logits);
  n.mask = mask;
  n.value = Tensor2(1, L.cols, -std::numeric_limits<double>::infinity());
  for (int j = 0; j < L.cols; ++j)
    if (mask[j]) n.value(0, j) = L(0, j) - lse;
  return push(std::move(n));
}

Graph::Var Graph::sum(Var a) {
  Node n(Op::kSum, a);
  double s = 0.0;
  for (double v : at(a).value.data) s += v;
  n.value = Tensor2(1, 1, s);
  return push(std::move(n));
}

void Graph::backward(Var loss) {
  const Tensor2& L = at(loss).value;
  if (L.rows != 1 || L.cols != 1) throw ShapeError("backward: loss must be 1x1, got " + L.shape_string());
  backward({{loss, Tensor2(1, 1, 1.0)}});
}

void Graph::backward(const std::vector<std::pair<Var, Tensor2>>& seeds) {
  if (nodes_.empty()) throw InvariantError("backward called before any forward pass");
  std::vector<Tensor2> grad(nodes_.size());
  Var top = -1;
  for (const auto& [v, g] : seeds) {
    const Tensor2& val = at(v).value;
    if (!val.same_shape(g))
      throw ShapeError("backward: seed " + g.shape_string() + " for output " + val.shape_string());
    add_into(grad[v], g);
    top = std::max(top, v);
  }
  for (Var v = top; v >= 0; --v) {
    if (grad[v].size() == 0) continue;
    const Node& n = nodes_[v];
    const Tensor2& g = grad[v];
    auto acc = [&](Var dst) -> Tensor2& {
      if (grad[dst].size() == 0) grad[dst] = Tensor2(nodes_[dst].value.rows, nodes_[dst].value.cols);
      return grad[dst];
    };
    switch (n.op) {
      case Op::kInput: break;
      case Op::kParam:
        if (n.param_grad) add_into(*n.param_grad, g);
        break;
      case Op::kMatmul: {
        const Tensor2 &A = nodes_[n.a].value, &B = nodes_[n.b].value;
        Tensor2& ga = acc(n.a);
        Tensor2& gb = acc(n.b);
        for (int i = 0; i < A.rows; ++i)
          for (int k = 0; k < A.cols; ++k) {
            double s = 0.0;
            const double aik = A(i, k);
            for (int j = 0; j < B.cols; ++j) {
              s += g(i, j) * B(k, j);
              gb(k, j) += aik * g(i, j);
            }
            ga(i, k) += s;
          }
        break;
      }
      case Op::kAddRow: {
        add_into(acc(n.a), g);
        Tensor2& gb = acc(n.b);
        for (int i = 0; i < g.rows; ++i)
          for (int j = 0; j < g.cols; ++j) gb(0, j) += g(i, j);
        break;
      }
      case Op::kAdd:
        add_into(acc(n.a), g);
        add_into(acc(n.b), g);
        break;
      case Op::kSub: {
        add_into(acc(n.a), g);
        Tensor2& gb = acc(n.b);
        for (std::size_t k = 0; k < g.size(); ++k) gb.data[k] -= g.data[k];
        break;
      }
      case Op::kMul: {
        const Tensor2 &A = nodes_[n.a].value, &B = nodes_[n.b].value;
        Tensor2& ga = acc(n.a);
        for (std::size_t k = 0; k < g.size(); ++k) ga.data[k] += g.data[k] * B.data[k];
        Tensor2& gb = acc(n.b);
        for (std::size_t k = 0; k < g.size(); ++k) gb.data[k] += g.data[k] * A.data[k];
        break;
      }
      case Op::kScale: {
        Tensor2& ga = acc(n.a);
        for (std::size_t k = 0; k < g.size(); ++k) ga.data[k] += g.data[k] * n.scalar;
        break;
      }
      case Op::kTanh: {
        Tensor2& ga = acc(n.a);
        for (std::size_t k = 0; k < g.size(); ++k) {
          const double y = n.value.data[k];
          ga.data[k] += g.data[k] * (1.0 - y * y);
        }
        break;
      }
      case Op::kSigmoid: {
        Tensor2& ga = acc(n.a);
        for (std::size_t k = 0; k < g.size(); ++k) {
          const double y = n.value.data[k];
          ga.data[k] += g.data[k] * y * (1.0 - y);
        }
        break;
      }
      case Op::kConcat: {
        Tensor2& ga = acc(n.a);
        Tensor2& gb = acc(n.b);
        for (int i = 0; i < g.rows; ++i) {
          for (int j = 0; j < ga.cols; ++j) ga(i, j) += g(i, j);
          for (int j = 0; j < gb.cols; ++j) gb(i, j) += g(i, ga.cols + j);
        }
        break;
      }
      case Op::kBroadcast: {
        Tensor2& ga = acc(n.a);
        for (int i = 0; i < g.rows; ++i)
          for (int j = 0; j < g.cols; ++j) ga(0, j) += g(i, j);
        break;
      }
      case Op::kGem: {
        const Tensor2& H = nodes_[n.a].value;
        const double theta = nodes_[n.b].value(0, 0);
        const double p = 1.0 + softplus(theta);
        const double eps = n.scalar;
        Tensor2& gh = acc(n.a);
        double dp = 0.0;
        for (int c = 0; c < H.cols; ++c) {
          const double y = n.value(0, c), m = n.aux[c];
          if (g(0, c) == 0.0) continue;
          double mprime = 0.0;
          for (int i = 0; i < H.rows; ++i) {
            const double x = std::max(H(i, c), eps);
            const double xp = std::pow(x, p);
            mprime += xp * std::log(x);
            if (H(i, c) > eps) gh(i, c) += g(0, c) * y * (xp / x) / (H.rows * m);
          }
          mprime /= H.rows;
          dp += g(0, c) * y * (-std::log(m) / (p * p) + mprime / (p * m));
        }
        acc(n.b)(0, 0) += dp * sigmoid_scalar(theta);
        break;
      }
      case Op::kFlatten: {
        Tensor2& ga = acc(n.a);
        for (std::size_t k = 0; k < g.size(); ++k) ga.data[k] += g.data[k];
        break;
      }
      case Op::kLogSoftmax: {
        Tensor2& ga = acc(n.a);
        double gs = 0.0;
        for (int j = 0; j < g.cols; ++j)
          if (n.mask[j]) gs += g(0, j);
        for (int j = 0; j < g.cols; ++j)
          if (n.mask[j]) ga(0, j) += g(0, j) - std::exp(n.value(0, j)) * gs;
        break;
      }
      case Op::kSelectRows: {
        Tensor2& ga = acc(n.a);
        for (std::size_t r = 0; r < n.rows.size(); ++r)
          for (int j = 0; j < g.cols; ++j) ga(n.rows[r], j) += g(static_cast<int>(r), j);
        break;
      }
      case Op::kSum: {
        Tensor2& ga = acc(n.a);
        for (double& x : ga.data) x += g(0, 0);
        break;
      }
    }
  }
}

}  // namespace vneap
