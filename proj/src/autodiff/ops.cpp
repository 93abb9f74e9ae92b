// Copyright 2026 The CFRE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfre/autodiff/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "cfre/errors.hpp"

namespace cfre::ad {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Shape broadcast_shape(const Array& a, const Array& b, const char* op) {
  if (a.shape() == b.shape()) return a.shape();
  // Two one-element operands keep the higher-rank shape ([1 x 1] beats {1}).
  if (a.is_scalar() && b.is_scalar()) return a.rank() >= b.rank() ? a.shape() : b.shape();
  if (a.is_scalar()) return b.shape();
  if (b.is_scalar()) return a.shape();
  throw InvalidArgument(std::string(op) + ": incompatible shapes " + shape_string(a.shape()) +
                        " and " + shape_string(b.shape()));
}

template <class F>
Array binary_kernel(const Array& a, const Array& b, const char* op, F f) {
  Shape shape = broadcast_shape(a, b, op);
  const std::size_t n = shape_size(shape);
  std::vector<double> out(n);
  const auto da = a.data();
  const auto db = b.data();
  const bool sa = a.size() == 1 && n != 1;
  const bool sb = b.size() == 1 && n != 1;
  for (std::size_t i = 0; i < n; ++i) out[i] = f(da[sa ? 0 : i], db[sb ? 0 : i]);
  return Array(std::move(shape), std::move(out));
}

template <class F>
Array unary_kernel(const Array& x, F f) {
  std::vector<double> out(x.size());
  const auto d = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(d[i]);
  return Array(x.shape(), std::move(out));
}

// tanh through one exponential (std::tanh is several times slower). Small
// arguments use expm1 so 1 - e^{-2|x|} does not cancel.
double fast_tanh(double x) {
  const double ax = std::abs(x);
  if (ax > 20.0) return std::copysign(1.0, x);
  if (ax < 0.55) {
    const double m = std::expm1(-2.0 * ax);
    return std::copysign(-m / (2.0 + m), x);
  }
  const double e = std::exp(-2.0 * ax);
  return std::copysign((1.0 - e) / (1.0 + e), x);
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double stable_softplus(double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0); }

void require_2d(const Array& x, const char* op) {
  if (x.rank() != 2) {
    throw InvalidArgument(std::string(op) + " needs a 2-D operand, got " + shape_string(x.shape()));
  }
}

// C = op(A) * op(B) where op is identity or transpose.
Array matmul_values(const Array& av, const Array& bv, bool ta, bool tb) {
  require_2d(av, "matmul");
  require_2d(bv, "matmul");
  const std::size_t m = ta ? av.cols() : av.rows();
  const std::size_t ka = ta ? av.rows() : av.cols();
  const std::size_t kb = tb ? bv.cols() : bv.rows();
  const std::size_t n = tb ? bv.rows() : bv.cols();
  if (ka != kb) {
    throw InvalidArgument("matmul: inner dimensions differ, " + shape_string(av.shape()) + " vs " +
                          shape_string(bv.shape()));
  }
  std::vector<double> out(m * n);
  Eigen::Map<const RowMat> A(av.data().data(), av.rows(), av.cols());
  Eigen::Map<const RowMat> B(bv.data().data(), bv.rows(), bv.cols());
  Eigen::Map<RowMat> C(out.data(), m, n);
  // Blocked GEMM has a large fixed cost; with a thin operand (the state and
  // time columns of a vector field) the coefficient-wise product is faster.
  const bool thin = std::min({m, ka, n}) <= 8;
  if (thin) {
    if (!ta && !tb) C = A.lazyProduct(B);
    else if (!ta && tb) C = A.lazyProduct(B.transpose());
    else if (ta && !tb) C = A.transpose().lazyProduct(B);
    else C = A.transpose().lazyProduct(B.transpose());
  } else {
    if (!ta && !tb) C.noalias() = A * B;
    else if (!ta && tb) C.noalias() = A * B.transpose();
    else if (ta && !tb) C.noalias() = A.transpose() * B;
    else C.noalias() = A.transpose() * B.transpose();
  }
  return Array({m, n}, std::move(out));
}

Var matmul_ex(const Var& a, const Var& b, bool ta, bool tb) {
  return detail::make_result(
      matmul_values(a.value(), b.value(), ta, tb), {a, b},
      [ta, tb](const Var& g, const Var&, std::span<const Var> in, std::span<const char> want, std::span<Var> grads) {
        const Var& A = in[0];
        const Var& B = in[1];
        if (!ta && !tb) {
          if (want[0]) grads[0] = matmul_ex(g, B, false, true);
          if (want[1]) grads[1] = matmul_ex(A, g, true, false);
        } else if (!ta && tb) {
          if (want[0]) grads[0] = matmul_ex(g, B, false, false);
          if (want[1]) grads[1] = matmul_ex(g, A, true, false);
        } else if (ta && !tb) {
          if (want[0]) grads[0] = matmul_ex(B, g, false, true);
          if (want[1]) grads[1] = matmul_ex(A, g, false, false);
        } else {
          if (want[0]) grads[0] = matmul_ex(B, g, true, true);
          if (want[1]) grads[1] = matmul_ex(g, A, true, true);
        }
      });
}

struct AxisSplit {
  std::size_t outer, len, inner;
};

AxisSplit split_axis(const Shape& shape, std::size_t axis) {
  AxisSplit s{1, shape[axis], 1};
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

}  // namespace

Var add(const Var& a, const Var& b) {
  return detail::make_result(
      binary_kernel(a.value(), b.value(), "add", [](double x, double y) { return x + y; }), {a, b},
      [](const Var& g, const Var&, std::span<const Var> in, std::span<const char> want, std::span<Var> grads) {
        if (want[0]) grads[0] = sum_to(g, in[0].shape());
        if (want[1]) grads[1] = sum_to(g, in[1].shape());
      });
}

Var sub(const Var& a, const Var& b) {
  return detail::make_result(
      binary_kernel(a.value(), b.value(), "sub", [](double x, double y) { return x - y; }), {a, b},
      [](const Var& g, const Var&, std::span<const Var> in, std::span<const char> want, std::span<Var> grads) {
        if (want[0]) grads[0] = sum_to(g, in[0].shape());
        if (want[1]) grads[1] = sum_to(neg(g), in[1].shape());
      });
}

Var mul(const Var& a, const Var& b) {
  return detail::make_result(
      binary_kernel(a.value(), b.value(), "mul", [](double x, double y) { return x * y; }), {a, b},
      [](const Var& g, const Var&, std::span<const Var> in, std::span<const char> want, std::span<Var> grads) {
        if (want[0]) grads[0] = sum_to(mul(g, in[1]), in[0].shape());
        if (want[1]) grads[1] = sum_to(mul(g, in[0]), in[1].shape());
      });
}

Var div(const Var& a, const Var& b) {
  const auto db = b.value().data();
  for (std::size_t i = 0; i < db.size(); ++i) {
    if (db[i] == 0.0) throw DomainError("div: zero divisor", i);
  }
  return detail::make_result(
      binary_kernel(a.value(), b.value(), "div", [](double x, double y) { return x / y; }), {a, b},
      [](const Var& g, const Var& out, std::span<const Var> in, std::span<const char> want, std::span<Var> grads) {
        if (want[0]) grads[0] = sum_to(div(g, in[1]), in[0].shape());
        if (want[1]) grads[1] = sum_to(neg(div(mul(g, out), in[1])), in[1].shape());
      });
}

Var neg(const Var& x) {
  return detail::make_result(unary_kernel(x.value(), [](double v) { return -v; }), {x},
                             [](const Var& g, const Var&, std::span<const Var>, std::span<const char>, std::span<Var> grads) {
                               grads[0] = neg(g);
                             });
}

Var exp(const Var& x) {
  return detail::make_result(unary_kernel(x.value(), [](double v) { return std::exp(v); }), {x},
                             [](const Var& g, const Var& out, std::span<const Var>, std::span<const char>, std::span<Var> grads) {
                               grads[0] = mul(g, out);
                             });
}

Var log(const Var& x) {
  const auto d = x.value().data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) throw DomainError("log: non-positive argument " + std::to_string(d[i]), i);
  }
  return detail::make_result(unary_kernel(x.value(), [](double v) { return std::log(v); }), {x},
                             [](const Var& g, const Var&, std::span<const Var> in, std::span<const char>, std::span<Var> grads) {
                               grads[0] = div(g, in[0]);
                             });
}

Var abs(const Var& x) {
  return detail::make_result(
      unary_kernel(x.value(), [](double v) { return std::abs(v); }), {x},
      [](const Var& g, const Var&, std::span<const Var> in, std::span<const char>, std::span<Var> grads) {
        Array sign = unary_kernel(in[0].value(), [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
        grads[0] = mul(g, constant(std::move(sign)));
      });
}

Var tanh(const Var& x) {
  return detail::make_result(unary_kernel(x.value(), fast_tanh), {x},
                             [](const Var& g, const Var& out, std::span<const Var>, std::span<const char>, std::span<Var> grads) {
                               grads[0] = mul(g, 1.0 - square(out));
                             });
}

Var square(const Var& x) {
  return detail::make_result(unary_kernel(x.value(), [](double v) { return v * v; }), {x},
                             [](const Var& g, const Var&, std::span<const Var> in, std::span<const char>, std::span<Var> grads) {
                               grads[0] = mul(g, in[0] * 2.0);
                             });
}

Var sigmoid(const Var& x) {
  return detail::make_result(unary_kernel(x.value(), stable_sigmoid), {x},
                             [](const Var& g, const Var& out, std::span<const Var>, std::span<const char>, std::span<Var> grads) {
                               grads[0] = mul(g, mul(out, 1.0 - out));
                             });
}

Var softplus(const Var& x) {
  return detail::make_result(unary_kernel(x.value(), stable_softplus), {x},
                             [](const Var& g, const Var&, std::span<const Var> in, std::span<const char>, std::span<Var> grads) {
                               grads[0] = mul(g, sigmoid(in[0]));
                             });
}

Var elementwise(ElementwiseOp op, std::span<const Var> operands) {
  const bool binary = op == ElementwiseOp::add || op == ElementwiseOp::sub ||
                      op == ElementwiseOp::mul || op == ElementwiseOp::div;
  const std::size_t arity = binary ? 2 : 1;
  if (operands.size() != arity) {
    throw InvalidArgument("elementwise: expected " + std::to_string(arity) + " operands, got " +
                          std::to_string(operands.size()));
  }
  switch (op) {
    case ElementwiseOp::add: return add(operands[0], operands[1]);
    case ElementwiseOp::sub: return sub(operands[0], operands[1]);
    case ElementwiseOp::mul: return mul(operands[0], operands[1]);
    case ElementwiseOp::div: return div(operands[0], operands[1]);
    case ElementwiseOp::exp: return exp(operands[0]);
    case ElementwiseOp::log: return log(operands[0]);
    case ElementwiseOp::abs: return abs(operands[0]);
    case ElementwiseOp::tanh: return tanh(operands[0]);
    case ElementwiseOp::square: return square(operands[0]);
    case ElementwiseOp::sigmoid: return sigmoid(operands[0]);
    case ElementwiseOp::softplus: return softplus(operands[0]);
  }
  throw InvalidArgument("elementwise: unknown op");
}

Var matmul(const Var& a, const Var& b) { return matmul_ex(a, b, false, false); }

Var linear(const Var& x, const Var& W, const Var& b) {
  const Array& xv = x.value();
  const Array& bv = b.value();
  Array prod = matmul_values(xv, W.value(), false, false);
  if (bv.rank() != 2 || bv.rows() != 1 || bv.cols() != prod.cols()) {
    throw InvalidArgument("linear: bias " + shape_string(bv.shape()) + " must be [1 x " + std::to_string(prod.cols()) +
                          "]");
  }
  std::vector<double> out(prod.data().begin(), prod.data().end());
  const std::size_t rows = prod.rows(), cols = prod.cols();
  const auto bias = bv.data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += bias[c];
  }
  return detail::make_result(
      Array({rows, cols}, std::move(out)), {x, W, b},
      [](const Var& g, const Var&, std::span<const Var> in, std::span<const char> want, std::span<Var> grads) {
        if (want[0]) grads[0] = matmul_ex(g, in[1], false, true);
        if (want[1]) grads[1] = matmul_ex(in[0], g, true, false);
        if (want[2]) grads[2] = sum(g, 0);
      });
}

Var transpose(const Var& x) {
  const Array& v = x.value();
  require_2d(v, "transpose");
  const std::size_t r = v.rows(), c = v.cols();
  std::vector<double> out(r * c);
  const auto d = v.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = d[i * c + j];
  return detail::make_result(Array({c, r}, std::move(out)), {x},
                             [](const Var& g, const Var&, std::span<const Var>, std::span<const char>, std::span<Var> grads) {
                               grads[0] = transpose(g);
                             });
}

Var sum(const Var& x, std::optional<std::size_t> axis) {
  const Array& v = x.value();
  if (!axis) {
    double s = 0.0;
    for (double e : v.data()) s += e;
    return detail::make_result(Array::scalar(s), {x},
                               [](const Var& g, const Var&, std::span<const Var> in, std::span<const char>, std::span<Var> grads) {
                                 grads[0] = expand(g, in[0].shape());
                               });
  }
  if (*axis >= v.rank()) {
    throw InvalidArgument("sum: axis " + std::to_string(*axis) + " out of range for " + shape_string(v.shape()));
  }
  const AxisSplit s = split_axis(v.shape(), *axis);
  Shape shape = v.shape();
  shape[*axis] = 1;
  std::vector<double> out(s.outer * s.inner, 0.0);
  const auto d = v.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t l = 0; l < s.len; ++l)
      for (std::size_t i = 0; i < s.inner; ++i) out[o * s.inner + i] += d[(o * s.len + l) * s.inner + i];
  return detail::make_result(Array(std::move(shape), std::move(out)), {x},
                             [](const Var& g, const Var&, std::span<const Var> in, std::span<const char>, std::span<Var> grads) {
                               grads[0] = expand(g, in[0].shape());
                             });
}

Var mean(const Var& x, std::optional<std::size_t> axis) {
  const Array& v = x.value();
  if (axis && *axis >= v.rank()) {
    throw InvalidArgument("mean: axis " + std::to_string(*axis) + " out of range for " + shape_string(v.shape()));
  }
  const double count = axis ? static_cast<double>(v.shape()[*axis]) : static_cast<double>(v.size());
  return sum(x, axis) / count;
}

Var expand(const Var& x, const Shape& shape) {
  const Array& v = x.value();
  if (v.shape() == shape) return x;
  const std::size_t n = shape_size(shape);
  std::vector<double> out;
  if (v.size() == 1) {
    out.assign(n, v[0]);
  } else {
    if (v.rank() != shape.size()) {
      throw InvalidArgument("expand: rank mismatch " + shape_string(v.shape()) + " -> " + shape_string(shape));
    }
    std::vector<std::size_t> stride(shape.size(), 0);
    std::size_t acc = 1;
    for (std::size_t k = shape.size(); k-- > 0;) {
      if (v.shape()[k] == shape[k]) {
        stride[k] = acc;
      } else if (v.shape()[k] != 1) {
        throw InvalidArgument("expand: cannot expand " + shape_string(v.shape()) + " to " + shape_string(shape));
      }
      acc *= v.shape()[k];
    }
    out.resize(n);
    std::vector<std::size_t> idx(shape.size(), 0);
    const auto d = v.data();
    std::size_t src = 0;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = d[src];
      for (std::size_t k = shape.size(); k-- > 0;) {
        ++idx[k];
        src += stride[k];
        if (idx[k] < shape[k]) break;
        src -= stride[k] * idx[k];
        idx[k] = 0;
      }
    }
  }
  return detail::make_result(Array(shape, std::move(out)), {x},
                             [](const Var& g, const Var&, std::span<const Var> in, std::span<const char>, std::span<Var> grads) {
                               grads[0] = sum_to(g, in[0].shape());
                             });
}

Var sum_to(const Var& x, const Shape& shape) {
  if (x.shape() == shape) return x;
  if (shape_size(shape) == 1) return reshape(sum(x), shape);
  if (x.shape().size() != shape.size()) {
    throw InvalidArgument("sum_to: rank mismatch " + shape_string(x.shape()) + " -> " + shape_string(shape));
  }
  Var r = x;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (shape[k] == 1 && r.shape()[k] != 1) {
      r = sum(r, k);
    } else if (shape[k] != r.shape()[k]) {
      throw InvalidArgument("sum_to: cannot reduce " + shape_string(x.shape()) + " to " + shape_string(shape));
    }
  }
  return r;
}

Var repeat_rows(const Var& x, std::size_t times) {
  const Array& v = x.value();
  require_2d(v, "repeat_rows");
  if (times == 0) throw InvalidArgument("repeat_rows: times must be positive");
  std::vector<double> out;
  out.reserve(v.size() * times);
  for (std::size_t t = 0; t < times; ++t) out.insert(out.end(), v.data().begin(), v.data().end());
  return detail::make_result(
      Array({v.rows() * times, v.cols()}, std::move(out)), {x},
      [times](const Var& g, const Var&, std::span<const Var> in, std::span<const char>, std::span<Var> grads) {
        const Shape& s = in[0].shape();
        grads[0] = reshape(sum(reshape(g, {times, s[0] * s[1]}), 0), s);
      });
}

Var reshape(const Var& x, const Shape& shape) {
  if (x.shape() == shape) return x;
  if (shape_size(shape) != x.size()) {
    throw InvalidArgument("reshape: " + shape_string(x.shape()) + " -> " + shape_string(shape) + " changes size");
  }
  return detail::make_result(Array(shape, x.value().to_vector()), {x},
                             [](const Var& g, const Var&, std::span<const Var> in, std::span<const char>, std::span<Var> grads) {
                               grads[0] = reshape(g, in[0].shape());
                             });
}

Var slice_cols(const Var& x, std::size_t begin, std::size_t end) {
  const Array& v = x.value();
  require_2d(v, "slice_cols");
  if (begin >= end || end > v.cols()) {
    throw InvalidArgument("slice_cols: bad range [" + std::to_string(begin) + ", " + std::to_string(end) +
                          ") for " + shape_string(v.shape()));
  }
  const std::size_t r = v.rows(), c = v.cols(), w = end - begin;
  std::vector<double> out(r * w);
  const auto d = v.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = d[i * c + begin + j];
  return detail::make_result(Array({r, w}, std::move(out)), {x},
                             [begin](const Var& g, const Var&, std::span<const Var> in, std::span<const char>, std::span<Var> grads) {
                               grads[0] = pad_cols(g, begin, in[0].shape()[1]);
                             });
}

Var pad_cols(const Var& x, std::size_t offset, std::size_t total_cols) {
  const Array& v = x.value();
  require_2d(v, "pad_cols");
  if (offset + v.cols() > total_cols) throw InvalidArgument("pad_cols: block exceeds target width");
  const std::size_t r = v.rows(), c = v.cols();
  std::vector<double> out(r * total_cols, 0.0);
  const auto d = v.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * total_cols + offset + j] = d[i * c + j];
  return detail::make_result(Array({r, total_cols}, std::move(out)), {x},
                             [offset](const Var& g, const Var&, std::span<const Var> in, std::span<const char>, std::span<Var> grads) {
                               grads[0] = slice_cols(g, offset, offset + in[0].shape()[1]);
                             });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw InvalidArgument("concat_cols: no parts");
  const std::size_t r = parts[0].value().rows();
  std::size_t total = 0;
  for (const auto& p : parts) {
    require_2d(p.value(), "concat_cols");
    if (p.value().rows() != r) throw InvalidArgument("concat_cols: row counts differ");
    total += p.value().cols();
  }
  std::vector<double> out(r * total);
  std::size_t off = 0;
  for (const auto& p : parts) {
    const std::size_t c = p.value().cols();
    const auto d = p.value().data();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) out[i * total + off + j] = d[i * c + j];
    off += c;
  }
  return detail::make_result(Array({r, total}, std::move(out)), std::vector<Var>(parts.begin(), parts.end()),
                             [](const Var& g, const Var&, std::span<const Var> in, std::span<const char> want, std::span<Var> grads) {
                               std::size_t o = 0;
                               for (std::size_t k = 0; k < in.size(); ++k) {
                                 const std::size_t c = in[k].shape()[1];
                                 if (want[k]) grads[k] = slice_cols(g, o, o + c);
                                 o += c;
                               }
                             });
}

Var detach(const Var& x) { return constant(x.value()); }

Var operator+(const Var& a, const Var& b) { return add(a, b); }
Var operator-(const Var& a, const Var& b) { return sub(a, b); }
Var operator*(const Var& a, const Var& b) { return mul(a, b); }
Var operator/(const Var& a, const Var& b) { return div(a, b); }
Var operator-(const Var& x) { return neg(x); }
Var operator+(const Var& a, double b) { return add(a, constant(b)); }
Var operator+(double a, const Var& b) { return add(constant(a), b); }
Var operator-(const Var& a, double b) { return sub(a, constant(b)); }
Var operator-(double a, const Var& b) { return sub(constant(a), b); }
Var operator*(const Var& a, double b) { return mul(a, constant(b)); }
Var operator*(double a, const Var& b) { return mul(constant(a), b); }
Var operator/(const Var& a, double b) {
  if (b == 0.0) throw DomainError("div: zero divisor", 0);
  return mul(a, constant(1.0 / b));
}

}  // namespace cfre::ad
