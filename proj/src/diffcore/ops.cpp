#include "mgfusion/diffcore/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mgfusion/common/error.hpp"

namespace mgf::diff {
namespace {

template <class T>
std::size_t last_extent(const Tensor<T>& x) {
  if (x.rank() == 0) fail(ErrorKind::dimension, "rank-0 tensor has no last axis");
  return x.shape().back();
}

template <class T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    fail(ErrorKind::dimension, std::string(op) + ": shapes " + shape_to_string(a.shape()) + " and " +
                                   shape_to_string(b.shape()) + " differ");
  }
}

template <class T>
T* grad_if(Node<T>& parent) {
  return parent.requires_grad ? parent.grad_data() : nullptr;
}

}  // namespace

template <class T>
Tensor<T> affine(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  const std::size_t in = last_extent(x);
  if (weight.rank() != 2 || weight.extent(0) != in || bias.rank() != 1 ||
      bias.extent(0) != weight.extent(1)) {
    fail(ErrorKind::dimension, "affine: input " + shape_to_string(x.shape()) + " against weight " +
                                   shape_to_string(weight.shape()) + " and bias " +
                                   shape_to_string(bias.shape()));
  }
  const std::size_t out = weight.extent(1);
  const std::size_t rows = x.size() / in;
  const T* xv = x.values().data();
  const T* wv = weight.values().data();
  const T* bv = bias.values().data();

  std::vector<T> y(rows * out);
  for (std::size_t r = 0; r < rows; ++r) {
    T* yr = y.data() + r * out;
    std::copy(bv, bv + out, yr);
    for (std::size_t i = 0; i < in; ++i) {
      const T xi = xv[r * in + i];
      if (xi == T(0)) continue;
      const T* wr = wv + i * out;
      for (std::size_t j = 0; j < out; ++j) yr[j] += xi * wr[j];
    }
  }

  Shape shape = x.shape();
  shape.back() = out;
  return Tensor<T>::from_op(std::move(shape), std::move(y), {x, weight, bias},
                            [rows, in, out](Node<T>& self) {
    const T* g = self.grad.data();
    Node<T>& xn = *self.parents[0];
    Node<T>& wn = *self.parents[1];
    Node<T>& bn = *self.parents[2];
    if (T* dx = grad_if(xn)) {
      const T* w = wn.value.data();
      for (std::size_t r = 0; r < rows; ++r) {
        const T* gr = g + r * out;
        for (std::size_t i = 0; i < in; ++i) {
          const T* wr = w + i * out;
          T acc = 0;
          for (std::size_t j = 0; j < out; ++j) acc += gr[j] * wr[j];
          dx[r * in + i] += acc;
        }
      }
    }
    if (T* dw = grad_if(wn)) {
      const T* xd = xn.value.data();
      for (std::size_t r = 0; r < rows; ++r) {
        const T* gr = g + r * out;
        for (std::size_t i = 0; i < in; ++i) {
          const T xi = xd[r * in + i];
          if (xi == T(0)) continue;
          T* dwr = dw + i * out;
          for (std::size_t j = 0; j < out; ++j) dwr[j] += xi * gr[j];
        }
      }
    }
    if (T* db = grad_if(bn)) {
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < out; ++j) db[j] += g[r * out + j];
    }
  });
}

template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.extent(1) != b.extent(0)) {
    fail(ErrorKind::dimension,
         "matmul: " + shape_to_string(a.shape()) + " x " + shape_to_string(b.shape()));
  }
  const std::size_t m = a.extent(0), k = a.extent(1), n = b.extent(1);
  const T* av = a.values().data();
  const T* bv = b.values().data();
  std::vector<T> y(m * n, T(0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const T aip = av[i * k + p];
      for (std::size_t j = 0; j < n; ++j) y[i * n + j] += aip * bv[p * n + j];
    }
  return Tensor<T>::from_op({m, n}, std::move(y), {a, b}, [m, k, n](Node<T>& self) {
    const T* g = self.grad.data();
    Node<T>& an = *self.parents[0];
    Node<T>& bn = *self.parents[1];
    if (T* da = grad_if(an)) {
      const T* bv = bn.value.data();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          T acc = 0;
          for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * bv[p * n + j];
          da[i * k + p] += acc;
        }
    }
    if (T* db = grad_if(bn)) {
      const T* av = an.value.data();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const T aip = av[i * k + p];
          for (std::size_t j = 0; j < n; ++j) db[p * n + j] += aip * g[i * n + j];
        }
    }
  });
}

template <class T>
Tensor<T> matmul_transposed(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.extent(1) != b.extent(1)) {
    fail(ErrorKind::dimension,
         "matmul_transposed: " + shape_to_string(a.shape()) + " x " + shape_to_string(b.shape()) + "^T");
  }
  const std::size_t m = a.extent(0), k = a.extent(1), n = b.extent(0);
  const T* av = a.values().data();
  const T* bv = b.values().data();
  std::vector<T> y(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      T acc = 0;
      for (std::size_t p = 0; p < k; ++p) acc += av[i * k + p] * bv[j * k + p];
      y[i * n + j] = acc;
    }
  return Tensor<T>::from_op({m, n}, std::move(y), {a, b}, [m, k, n](Node<T>& self) {
    const T* g = self.grad.data();
    Node<T>& an = *self.parents[0];
    Node<T>& bn = *self.parents[1];
    if (T* da = grad_if(an)) {
      const T* bv = bn.value.data();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const T gij = g[i * n + j];
          for (std::size_t p = 0; p < k; ++p) da[i * k + p] += gij * bv[j * k + p];
        }
    }
    if (T* db = grad_if(bn)) {
      const T* av = an.value.data();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const T gij = g[i * n + j];
          for (std::size_t p = 0; p < k; ++p) db[j * k + p] += gij * av[i * k + p];
        }
    }
  });
}

template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "add");
  std::vector<T> y(a.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a[i] + b[i];
  return Tensor<T>::from_op(a.shape(), std::move(y), {a, b}, [](Node<T>& self) {
    for (int p = 0; p < 2; ++p)
      if (T* d = grad_if(*self.parents[p]))
        for (std::size_t i = 0; i < self.grad.size(); ++i) d[i] += self.grad[i];
  });
}

template <class T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "mul");
  std::vector<T> y(a.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a[i] * b[i];
  return Tensor<T>::from_op(a.shape(), std::move(y), {a, b}, [](Node<T>& self) {
    Node<T>& an = *self.parents[0];
    Node<T>& bn = *self.parents[1];
    if (T* da = grad_if(an))
      for (std::size_t i = 0; i < self.grad.size(); ++i) da[i] += self.grad[i] * bn.value[i];
    if (T* db = grad_if(bn))
      for (std::size_t i = 0; i < self.grad.size(); ++i) db[i] += self.grad[i] * an.value[i];
  });
}

template <class T>
Tensor<T> scale(const Tensor<T>& x, double factor) {
  const T f = static_cast<T>(factor);
  std::vector<T> y(x.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] * f;
  return Tensor<T>::from_op(x.shape(), std::move(y), {x}, [f](Node<T>& self) {
    T* d = self.parents[0]->grad_data();
    for (std::size_t i = 0; i < self.grad.size(); ++i) d[i] += self.grad[i] * f;
  });
}

template <class T>
Tensor<T> add_row(const Tensor<T>& x, const Tensor<T>& row) {
  const std::size_t n = last_extent(x);
  if (row.rank() != 1 || row.extent(0) != n) {
    fail(ErrorKind::dimension,
         "add_row: " + shape_to_string(x.shape()) + " + " + shape_to_string(row.shape()));
  }
  std::vector<T> y(x.values().begin(), x.values().end());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += row[i % n];
  return Tensor<T>::from_op(x.shape(), std::move(y), {x, row}, [n](Node<T>& self) {
    if (T* dx = grad_if(*self.parents[0]))
      for (std::size_t i = 0; i < self.grad.size(); ++i) dx[i] += self.grad[i];
    if (T* dr = grad_if(*self.parents[1]))
      for (std::size_t i = 0; i < self.grad.size(); ++i) dr[i % n] += self.grad[i];
  });
}

template <class T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
  if (element_count(shape) != x.size()) {
    fail(ErrorKind::dimension,
         "reshape: " + shape_to_string(x.shape()) + " to " + shape_to_string(shape));
  }
  std::vector<T> y(x.values().begin(), x.values().end());
  return Tensor<T>::from_op(std::move(shape), std::move(y), {x}, [](Node<T>& self) {
    T* d = self.parents[0]->grad_data();
    for (std::size_t i = 0; i < self.grad.size(); ++i) d[i] += self.grad[i];
  });
}

template <class T>
Tensor<T> relu(const Tensor<T>& x) {
  std::vector<T> y(x.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
  return Tensor<T>::from_op(x.shape(), std::move(y), {x}, [](Node<T>& self) {
    Node<T>& xn = *self.parents[0];
    T* d = xn.grad_data();
    // Subgradient at exactly 0 is 0.
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      if (xn.value[i] > T(0)) d[i] += self.grad[i];
  });
}

template <class T>
Tensor<T> softmax(const Tensor<T>& x) {
  const std::size_t n = last_extent(x);
  const std::size_t rows = x.size() / n;
  std::vector<T> y(x.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = x.values().data() + r * n;
    T* yr = y.data() + r * n;
    const T mx = *std::max_element(xr, xr + n);
    T sum = 0;
    for (std::size_t j = 0; j < n; ++j) sum += (yr[j] = std::exp(xr[j] - mx));
    for (std::size_t j = 0; j < n; ++j) yr[j] /= sum;
  }
  return Tensor<T>::from_op(x.shape(), std::move(y), {x}, [rows, n](Node<T>& self) {
    T* d = self.parents[0]->grad_data();
    for (std::size_t r = 0; r < rows; ++r) {
      const T* yr = self.value.data() + r * n;
      const T* gr = self.grad.data() + r * n;
      T dot = 0;
      for (std::size_t j = 0; j < n; ++j) dot += gr[j] * yr[j];
      for (std::size_t j = 0; j < n; ++j) d[r * n + j] += yr[j] * (gr[j] - dot);
    }
  });
}

template <class T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias, double eps) {
  const std::size_t n = last_extent(x);
  if (n < 2) fail(ErrorKind::dimension, "layer_norm needs a last extent of at least 2");
  if (gain.rank() != 1 || gain.extent(0) != n || bias.rank() != 1 || bias.extent(0) != n) {
    fail(ErrorKind::dimension, "layer_norm: input " + shape_to_string(x.shape()) + " with gain " +
                                   shape_to_string(gain.shape()) + " and bias " +
                                   shape_to_string(bias.shape()));
  }
  const std::size_t rows = x.size() / n;
  std::vector<T> normalized(x.size());
  std::vector<T> inv_std(rows);
  std::vector<T> y(x.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = x.values().data() + r * n;
    T mean = 0;
    for (std::size_t j = 0; j < n; ++j) mean += xr[j];
    mean /= static_cast<T>(n);
    T var = 0;
    for (std::size_t j = 0; j < n; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= static_cast<T>(n);
    const T inv = T(1) / std::sqrt(var + static_cast<T>(eps));
    inv_std[r] = inv;
    for (std::size_t j = 0; j < n; ++j) {
      normalized[r * n + j] = (xr[j] - mean) * inv;
      y[r * n + j] = gain[j] * normalized[r * n + j] + bias[j];
    }
  }
  return Tensor<T>::from_op(
      x.shape(), std::move(y), {x, gain, bias},
      [rows, n, normalized = std::move(normalized), inv_std = std::move(inv_std)](Node<T>& self) {
        const T* g = self.grad.data();
        Node<T>& xn = *self.parents[0];
        Node<T>& gn = *self.parents[1];
        Node<T>& bn = *self.parents[2];
        if (T* dg = grad_if(gn))
          for (std::size_t i = 0; i < self.grad.size(); ++i) dg[i % n] += g[i] * normalized[i];
        if (T* db = grad_if(bn))
          for (std::size_t i = 0; i < self.grad.size(); ++i) db[i % n] += g[i];
        if (T* dx = grad_if(xn)) {
          const T nn = static_cast<T>(n);
          for (std::size_t r = 0; r < rows; ++r) {
            T sum_dxhat = 0, sum_dxhat_xhat = 0;
            for (std::size_t j = 0; j < n; ++j) {
              const T dxhat = g[r * n + j] * gn.value[j];
              sum_dxhat += dxhat;
              sum_dxhat_xhat += dxhat * normalized[r * n + j];
            }
            for (std::size_t j = 0; j < n; ++j) {
              const T dxhat = g[r * n + j] * gn.value[j];
              dx[r * n + j] += inv_std[r] / nn *
                               (nn * dxhat - sum_dxhat - normalized[r * n + j] * sum_dxhat_xhat);
            }
          }
        }
      });
}

template <class T>
Tensor<T> dropout(const Tensor<T>& x, double p, Mode mode, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) fail(ErrorKind::parameter, "dropout probability must lie in [0, 1)");
  if (mode == Mode::eval || p == 0.0) return x;
  std::bernoulli_distribution drop(p);
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
  std::vector<T> factors(x.size());
  std::vector<T> y(x.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    factors[i] = drop(rng) ? T(0) : keep_scale;
    y[i] = x[i] * factors[i];
  }
  return Tensor<T>::from_op(x.shape(), std::move(y), {x},
                            [factors = std::move(factors)](Node<T>& self) {
    T* d = self.parents[0]->grad_data();
    for (std::size_t i = 0; i < self.grad.size(); ++i) d[i] += self.grad[i] * factors[i];
  });
}

template <class T>
Tensor<T> masked_mean(const Tensor<T>& x, const Mask& mask) {
  if (x.rank() != 2) fail(ErrorKind::dimension, "masked_mean expects [K, D], got " + shape_to_string(x.shape()));
  const std::size_t k = x.extent(0), d = x.extent(1);
  if (mask.size() != k) {
    fail(ErrorKind::dimension, "masked_mean: mask of length " + std::to_string(mask.size()) +
                                   " for " + std::to_string(k) + " positions");
  }
  const std::size_t count = mask.count();
  if (count == 0) fail(ErrorKind::empty_sequence, "masked_mean over a fully masked sequence");
  const T inv = T(1) / static_cast<T>(count);
  std::vector<T> y(d, T(0));
  for (std::size_t r = 0; r < k; ++r) {
    if (!mask[r]) continue;
    for (std::size_t j = 0; j < d; ++j) y[j] += x[r * d + j];
  }
  for (auto& v : y) v *= inv;
  return Tensor<T>::from_op({d}, std::move(y), {x}, [mask, k, d, inv](Node<T>& self) {
    T* dx = self.parents[0]->grad_data();
    for (std::size_t r = 0; r < k; ++r) {
      if (!mask[r]) continue;
      for (std::size_t j = 0; j < d; ++j) dx[r * d + j] += self.grad[j] * inv;
    }
  });
}

template <class T>
Tensor<T> concat(const std::vector<Tensor<T>>& xs) {
  if (xs.empty()) fail(ErrorKind::dimension, "concat of zero tensors");
  Shape lead = xs.front().shape();
  lead.pop_back();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& x : xs) {
    Shape l = x.shape();
    const std::size_t w = last_extent(x);
    l.pop_back();
    if (l != lead) {
      fail(ErrorKind::dimension, "concat: " + shape_to_string(xs.front().shape()) + " and " +
                                     shape_to_string(x.shape()) + " disagree off the last axis");
    }
    widths.push_back(w);
    total += w;
  }
  const std::size_t rows = element_count(lead);
  std::vector<T> y(rows * total);
  std::size_t offset = 0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const std::size_t w = widths[t];
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(xs[t].values().data() + r * w, w, y.data() + r * total + offset);
    offset += w;
  }
  Shape shape = lead;
  shape.push_back(total);
  return Tensor<T>::from_op(std::move(shape), std::move(y), xs,
                            [rows, total, widths = std::move(widths)](Node<T>& self) {
    std::size_t offset = 0;
    for (std::size_t t = 0; t < widths.size(); ++t) {
      const std::size_t w = widths[t];
      if (T* d = grad_if(*self.parents[t]))
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t j = 0; j < w; ++j) d[r * w + j] += self.grad[r * total + offset + j];
      offset += w;
    }
  });
}

template <class T>
Tensor<T> slice_last(const Tensor<T>& x, std::size_t offset, std::size_t width) {
  const std::size_t n = last_extent(x);
  if (width == 0 || offset + width > n) {
    fail(ErrorKind::dimension, "slice_last: [" + std::to_string(offset) + ", " +
                                   std::to_string(offset + width) + ") out of " +
                                   shape_to_string(x.shape()));
  }
  const std::size_t rows = x.size() / n;
  std::vector<T> y(rows * width);
  for (std::size_t r = 0; r < rows; ++r)
    std::copy_n(x.values().data() + r * n + offset, width, y.data() + r * width);
  Shape shape = x.shape();
  shape.back() = width;
  return Tensor<T>::from_op(std::move(shape), std::move(y), {x},
                            [rows, n, offset, width](Node<T>& self) {
    T* d = self.parents[0]->grad_data();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < width; ++j) d[r * n + offset + j] += self.grad[r * width + j];
  });
}

template <class T>
Tensor<T> cross_entropy(const Tensor<T>& logits, std::span<const std::size_t> targets) {
  if (logits.rank() != 2 || logits.extent(0) != targets.size()) {
    fail(ErrorKind::dimension, "cross_entropy: logits " + shape_to_string(logits.shape()) + " for " +
                                   std::to_string(targets.size()) + " targets");
  }
  const std::size_t b = logits.extent(0), c = logits.extent(1);
  for (std::size_t i = 0; i < b; ++i) {
    if (targets[i] >= c) {
      fail(ErrorKind::label, "target " + std::to_string(targets[i]) + " outside [0, " +
                                 std::to_string(c) + ")");
    }
  }
  std::vector<T> probs(b * c);
  T loss = 0;
  for (std::size_t i = 0; i < b; ++i) {
    const T* row = logits.values().data() + i * c;
    const T mx = *std::max_element(row, row + c);
    T sum = 0;
    for (std::size_t j = 0; j < c; ++j) sum += (probs[i * c + j] = std::exp(row[j] - mx));
    for (std::size_t j = 0; j < c; ++j) probs[i * c + j] /= sum;
    loss += std::log(sum) + mx - row[targets[i]];
  }
  loss /= static_cast<T>(b);
  std::vector<std::size_t> tgt(targets.begin(), targets.end());
  return Tensor<T>::from_op({1}, {loss}, {logits},
                            [b, c, probs = std::move(probs), tgt = std::move(tgt)](Node<T>& self) {
    T* d = self.parents[0]->grad_data();
    const T g = self.grad[0] / static_cast<T>(b);
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t j = 0; j < c; ++j)
        d[i * c + j] += g * (probs[i * c + j] - (j == tgt[i] ? T(1) : T(0)));
  });
}

template <class T>
Tensor<T> layer_weighted_average(const Tensor<T>& stack, const Tensor<T>& weights, double min_weight_sum) {
  if (stack.rank() != 3 || weights.rank() != 1 || weights.extent(0) != stack.extent(0)) {
    fail(ErrorKind::dimension, "layer_weighted_average: stack " + shape_to_string(stack.shape()) +
                                   " with weights " + shape_to_string(weights.shape()));
  }
  const std::size_t layers = stack.extent(0);
  const std::size_t plane = stack.extent(1) * stack.extent(2);
  T sum = 0;
  for (std::size_t l = 0; l < layers; ++l) sum += weights[l];
  if (!(std::abs(static_cast<double>(sum)) >= min_weight_sum)) {
    fail(ErrorKind::numerical, "degenerate layer weights: |sum w| = " +
                                   std::to_string(std::abs(static_cast<double>(sum))));
  }
  std::vector<T> y(plane, T(0));
  for (std::size_t l = 0; l < layers; ++l) {
    const T w = weights[l] / sum;
    const T* xl = stack.values().data() + l * plane;
    for (std::size_t i = 0; i < plane; ++i) y[i] += w * xl[i];
  }
  return Tensor<T>::from_op({stack.extent(1), stack.extent(2)}, std::move(y), {stack, weights},
                            [layers, plane, sum](Node<T>& self) {
    Node<T>& sn = *self.parents[0];
    Node<T>& wn = *self.parents[1];
    const T* g = self.grad.data();
    if (T* dw = grad_if(wn)) {
      for (std::size_t l = 0; l < layers; ++l) {
        const T* xl = sn.value.data() + l * plane;
        T acc = 0;
        for (std::size_t i = 0; i < plane; ++i) acc += g[i] * (xl[i] - self.value[i]);
        dw[l] += acc / sum;
      }
    }
    if (T* ds = grad_if(sn)) {
      for (std::size_t l = 0; l < layers; ++l) {
        const T w = wn.value[l] / sum;
        for (std::size_t i = 0; i < plane; ++i) ds[l * plane + i] += g[i] * w;
      }
    }
  });
}

template <class T>
Tensor<T> mask_bias(const Mask& mask) {
  std::vector<T> v(mask.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mask[i] ? T(0) : static_cast<T>(kMaskedLogit);
  return Tensor<T>::constant({mask.size()}, std::move(v));
}

#define MGF_INSTANTIATE_OPS(T)                                                                    \
  template Tensor<T> affine(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);               \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                                 \
  template Tensor<T> matmul_transposed(const Tensor<T>&, const Tensor<T>&);                      \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                    \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                    \
  template Tensor<T> scale(const Tensor<T>&, double);                                            \
  template Tensor<T> add_row(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                                           \
  template Tensor<T> relu(const Tensor<T>&);                                                     \
  template Tensor<T> softmax(const Tensor<T>&);                                                  \
  template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, double);   \
  template Tensor<T> dropout(const Tensor<T>&, double, Mode, Rng&);                              \
  template Tensor<T> masked_mean(const Tensor<T>&, const Mask&);                                 \
  template Tensor<T> concat(const std::vector<Tensor<T>>&);                                      \
  template Tensor<T> slice_last(const Tensor<T>&, std::size_t, std::size_t);                     \
  template Tensor<T> cross_entropy(const Tensor<T>&, std::span<const std::size_t>);              \
  template Tensor<T> layer_weighted_average(const Tensor<T>&, const Tensor<T>&, double);         \
  template Tensor<T> mask_bias(const Mask&);

MGF_INSTANTIATE_OPS(float)
MGF_INSTANTIATE_OPS(double)

#undef MGF_INSTANTIATE_OPS

}  // namespace mgf::diff
