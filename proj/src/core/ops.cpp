#include "core/ops.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace mmb::ops {

namespace {

bool wants_grad(const Tensor& t) { return t.requires_grad; }

double row_norm(const Tensor& t, int r) {
  double s = 0.0;
  const int d = t.cols();
  for (int c = 0; c < d; ++c) s += t.at(r, c) * t.at(r, c);
  return std::sqrt(s);
}

}  // namespace

Tensor add(Graph& g, const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  Tensor out = Tensor::zeros(a.shape, wants_grad(a) || wants_grad(b));
  const std::size_t n = out.numel();
  for (std::size_t i = 0; i < n; ++i) (*out.data)[i] = (*a.data)[i] + (*b.data)[i];
  if (out.requires_grad) {
    g.record([a, b, out, n]() {
      if (a.requires_grad)
        for (std::size_t i = 0; i < n; ++i) (*a.grad)[i] += (*out.grad)[i];
      if (b.requires_grad)
        for (std::size_t i = 0; i < n; ++i) (*b.grad)[i] += (*out.grad)[i];
    });
  }
  return out;
}

Tensor scale(Graph& g, const Tensor& x, double c) {
  Tensor out = Tensor::zeros(x.shape, wants_grad(x));
  const std::size_t n = out.numel();
  for (std::size_t i = 0; i < n; ++i) (*out.data)[i] = c * (*x.data)[i];
  if (out.requires_grad) {
    g.record([x, out, c, n]() {
      for (std::size_t i = 0; i < n; ++i) (*x.grad)[i] += c * (*out.grad)[i];
    });
  }
  return out;
}

Tensor matmul(Graph& g, const Tensor& a, const Tensor& b) {
  if (b.rank() != 2)
    throw DimensionError("matmul: right operand must be a matrix");
  const int m = a.rows(), k = a.cols(), n = b.shape[1];
  if (k != b.shape[0])
    throw DimensionError("matmul: inner dimensions " + a.shape_str() + " vs " +
                         b.shape_str());
  Tensor out = Tensor::zeros(a.rank() == 1 ? std::vector<int>{n}
                                           : std::vector<int>{m, n},
                             wants_grad(a) || wants_grad(b));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += a.at(i, p) * b.at(p, j);
      out.at(i, j) = s;
    }
  if (out.requires_grad) {
    g.record([a, b, out, m, k, n]() {
      if (a.requires_grad)
        for (int i = 0; i < m; ++i)
          for (int p = 0; p < k; ++p) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
              s += (*out.grad)[static_cast<std::size_t>(i) * n + j] * b.at(p, j);
            (*a.grad)[static_cast<std::size_t>(i) * k + p] += s;
          }
      if (b.requires_grad)
        for (int p = 0; p < k; ++p)
          for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < m; ++i)
              s += a.at(i, p) * (*out.grad)[static_cast<std::size_t>(i) * n + j];
            (*b.grad)[static_cast<std::size_t>(p) * n + j] += s;
          }
    });
  }
  return out;
}

Tensor add_row_bias(Graph& g, const Tensor& x, const Tensor& bias) {
  if (bias.rank() != 1)
    throw DimensionError("add_row_bias: bias must be rank 1");
  const int m = x.rows(), n = x.cols();
  if (n != bias.shape[0])
    throw DimensionError("add_row_bias: width mismatch " + x.shape_str() +
                         " vs " + bias.shape_str());
  Tensor out = Tensor::zeros(x.shape, wants_grad(x) || wants_grad(bias));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) = x.at(i, j) + (*bias.data)[j];
  if (out.requires_grad) {
    g.record([x, bias, out, m, n]() {
      if (x.requires_grad)
        for (std::size_t i = 0; i < static_cast<std::size_t>(m) * n; ++i)
          (*x.grad)[i] += (*out.grad)[i];
      if (bias.requires_grad)
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int i = 0; i < m; ++i)
            s += (*out.grad)[static_cast<std::size_t>(i) * n + j];
          (*bias.grad)[j] += s;
        }
    });
  }
  return out;
}

Tensor tanh(Graph& g, const Tensor& x) {
  Tensor out = Tensor::zeros(x.shape, wants_grad(x));
  const std::size_t n = out.numel();
  for (std::size_t i = 0; i < n; ++i) (*out.data)[i] = std::tanh((*x.data)[i]);
  if (out.requires_grad) {
    g.record([x, out, n]() {
      for (std::size_t i = 0; i < n; ++i) {
        const double y = (*out.data)[i];
        (*x.grad)[i] += (1.0 - y * y) * (*out.grad)[i];
      }
    });
  }
  return out;
}

Tensor concat_cols(Graph& g, const Tensor& a, const Tensor& b) {
  if (a.rank() != b.rank())
    throw DimensionError("concat_cols: rank mismatch");
  const int m = a.rows();
  if (m != b.rows())
    throw DimensionError("concat_cols: row count mismatch " + a.shape_str() +
                         " vs " + b.shape_str());
  const int p = a.cols(), q = b.cols();
  Tensor out = Tensor::zeros(a.rank() == 1 ? std::vector<int>{p + q}
                                           : std::vector<int>{m, p + q},
                             wants_grad(a) || wants_grad(b));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < p; ++j) out.at(i, j) = a.at(i, j);
    for (int j = 0; j < q; ++j) out.at(i, p + j) = b.at(i, j);
  }
  if (out.requires_grad) {
    g.record([a, b, out, m, p, q]() {
      for (int i = 0; i < m; ++i) {
        const std::size_t base = static_cast<std::size_t>(i) * (p + q);
        if (a.requires_grad)
          for (int j = 0; j < p; ++j)
            (*a.grad)[static_cast<std::size_t>(i) * p + j] += (*out.grad)[base + j];
        if (b.requires_grad)
          for (int j = 0; j < q; ++j)
            (*b.grad)[static_cast<std::size_t>(i) * q + j] +=
                (*out.grad)[base + p + j];
      }
    });
  }
  return out;
}

Tensor mean_rows(Graph& g, const Tensor& x) {
  if (x.rank() != 2) throw DimensionError("mean_rows: matrix expected");
  const int m = x.shape[0], n = x.shape[1];
  Tensor out = Tensor::zeros({n}, wants_grad(x));
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += x.at(i, j);
    (*out.data)[j] = s / m;
  }
  if (out.requires_grad) {
    g.record([x, out, m, n]() {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
          (*x.grad)[static_cast<std::size_t>(i) * n + j] += (*out.grad)[j] / m;
    });
  }
  return out;
}

Tensor cosine_rows(Graph& g, const Tensor& queries, const Tensor& keys,
                   bool eps_guard) {
  if (keys.rank() != 2) throw DimensionError("cosine_rows: keys must be a matrix");
  const int m = queries.rows(), d = queries.cols(), n = keys.shape[0];
  if (d != keys.shape[1])
    throw DimensionError("cosine_rows: feature width mismatch " +
                         queries.shape_str() + " vs " + keys.shape_str());

  // Raw norms decide whether the epsilon clamp is active per row; the
  // clamped norms feed the similarity itself.
  std::vector<double> qnorm(m), knorm(n);
  std::vector<char> qlive(m), klive(n);
  for (int i = 0; i < m; ++i) {
    const double raw = row_norm(queries, i);
    if (!eps_guard && raw == 0.0)
      throw DomainError("cosine_rows: zero-norm query row");
    qlive[i] = raw > norm_epsilon;
    qnorm[i] = std::max(raw, norm_epsilon);
  }
  for (int j = 0; j < n; ++j) {
    const double raw = row_norm(keys, j);
    if (!eps_guard && raw == 0.0)
      throw DomainError("cosine_rows: zero-norm key row");
    klive[j] = raw > norm_epsilon;
    knorm[j] = std::max(raw, norm_epsilon);
  }

  Tensor out = Tensor::zeros(queries.rank() == 1 ? std::vector<int>{n}
                                                 : std::vector<int>{m, n},
                             wants_grad(queries) || wants_grad(keys));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double dot = 0.0;
      for (int c = 0; c < d; ++c) dot += queries.at(i, c) * keys.at(j, c);
      out.at(i, j) = dot / (qnorm[i] * knorm[j]);
    }

  if (out.requires_grad) {
    g.record([queries, keys, out, qnorm, knorm, qlive, klive, m, d, n]() {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
          const double go = (*out.grad)[static_cast<std::size_t>(i) * n + j];
          if (go == 0.0) continue;
          const double sim = out.at(i, j);
          const double inv = 1.0 / (qnorm[i] * knorm[j]);
          // Norm terms vanish where the epsilon clamp is active.
          for (int c = 0; c < d; ++c) {
            if (queries.requires_grad) {
              double gq = keys.at(j, c) * inv;
              if (qlive[i]) gq -= sim * queries.at(i, c) / (qnorm[i] * qnorm[i]);
              (*queries.grad)[static_cast<std::size_t>(i) * d + c] += go * gq;
            }
            if (keys.requires_grad) {
              double gk = queries.at(i, c) * inv;
              if (klive[j]) gk -= sim * keys.at(j, c) / (knorm[j] * knorm[j]);
              (*keys.grad)[static_cast<std::size_t>(j) * d + c] += go * gk;
            }
          }
        }
    });
  }
  return out;
}

Tensor cosine_similarity(Graph& g, const Tensor& a, const Tensor& b,
                         bool eps_guard) {
  if (a.rank() != 1 || b.rank() != 1)
    throw DimensionError("cosine_similarity: vectors expected");
  check_same_shape(a, b, "cosine_similarity");
  const int d = a.shape[0];
  double na = row_norm(a, 0), nb = row_norm(b, 0);
  if (!eps_guard && (na == 0.0 || nb == 0.0))
    throw DomainError("cosine_similarity: zero-norm input");
  const double ua = std::max(na, norm_epsilon), ub = std::max(nb, norm_epsilon);
  double dot = 0.0;
  for (int c = 0; c < d; ++c) dot += (*a.data)[c] * (*b.data)[c];

  Tensor out = Tensor::scalar(dot / (ua * ub), wants_grad(a) || wants_grad(b));
  if (out.requires_grad) {
    g.record([a, b, out, ua, ub, na, nb, d]() {
      const double go = (*out.grad)[0];
      const double sim = (*out.data)[0];
      const double inv = 1.0 / (ua * ub);
      for (int c = 0; c < d; ++c) {
        if (a.requires_grad) {
          double ga = (*b.data)[c] * inv;
          if (na > norm_epsilon) ga -= sim * (*a.data)[c] / (ua * ua);
          (*a.grad)[c] += go * ga;
        }
        if (b.requires_grad) {
          double gb = (*a.data)[c] * inv;
          if (nb > norm_epsilon) gb -= sim * (*b.data)[c] / (ub * ub);
          (*b.grad)[c] += go * gb;
        }
      }
    });
  }
  return out;
}

Tensor scaled_softmax(Graph& g, const Tensor& scores, double sharpness) {
  if (!(sharpness > 0.0))
    throw ValidationError("scaled_softmax: sharpness must be positive");
  check_finite(scores, "scaled_softmax");
  const int m = scores.rows(), n = scores.cols();
  Tensor out = Tensor::zeros(scores.shape, wants_grad(scores));
  for (int i = 0; i < m; ++i) {
    double hi = -1e300;
    for (int j = 0; j < n; ++j) hi = std::max(hi, sharpness * scores.at(i, j));
    double z = 0.0;
    for (int j = 0; j < n; ++j) {
      const double e = std::exp(sharpness * scores.at(i, j) - hi);
      out.at(i, j) = e;
      z += e;
    }
    for (int j = 0; j < n; ++j) out.at(i, j) /= z;
  }
  if (out.requires_grad) {
    g.record([scores, out, sharpness, m, n]() {
      for (int i = 0; i < m; ++i) {
        double dot = 0.0;
        for (int j = 0; j < n; ++j) {
          const std::size_t k = static_cast<std::size_t>(i) * n + j;
          dot += (*out.grad)[k] * (*out.data)[k];
        }
        for (int j = 0; j < n; ++j) {
          const std::size_t k = static_cast<std::size_t>(i) * n + j;
          (*scores.grad)[k] +=
              sharpness * (*out.data)[k] * ((*out.grad)[k] - dot);
        }
      }
    });
  }
  return out;
}

Tensor kl_divergence(Graph& g, const Tensor& p, const Tensor& q, bool clamp_q) {
  check_same_shape(p, q, "kl_divergence");
  const std::size_t n = p.numel();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pi = (*p.data)[i];
    if (pi <= 0.0) continue;  // 0 * log(0/.) = 0
    double qi = (*q.data)[i];
    if (qi < kl_epsilon) {
      if (!clamp_q) throw DomainError("kl_divergence: zero q component");
      qi = kl_epsilon;
    }
    total += pi * (std::log(pi) - std::log(qi));
  }
  Tensor out = Tensor::scalar(total, wants_grad(p) || wants_grad(q));
  if (out.requires_grad) {
    g.record([p, q, out, n]() {
      const double go = (*out.grad)[0];
      for (std::size_t i = 0; i < n; ++i) {
        const double pi = (*p.data)[i];
        if (pi <= 0.0) continue;
        const double qi = std::max((*q.data)[i], kl_epsilon);
        if (p.requires_grad)
          (*p.grad)[i] += go * (std::log(pi) - std::log(qi) + 1.0);
        if (q.requires_grad && (*q.data)[i] >= kl_epsilon)
          (*q.grad)[i] -= go * pi / qi;
      }
    });
  }
  return out;
}

Tensor cross_entropy(Graph& g, const Tensor& logits, int label) {
  if (logits.rank() != 1)
    throw DimensionError("cross_entropy: logits must be rank 1");
  const int k = logits.shape[0];
  if (label < 0 || label >= k)
    throw DomainError("cross_entropy: label " + std::to_string(label) +
                      " out of range [0," + std::to_string(k) + ")");
  double hi = -1e300;
  for (int j = 0; j < k; ++j) hi = std::max(hi, (*logits.data)[j]);
  double z = 0.0;
  for (int j = 0; j < k; ++j) z += std::exp((*logits.data)[j] - hi);
  const double lse = hi + std::log(z);
  Tensor out = Tensor::scalar(lse - (*logits.data)[label], wants_grad(logits));
  if (out.requires_grad) {
    g.record([logits, out, label, k, hi, z]() {
      const double go = (*out.grad)[0];
      for (int j = 0; j < k; ++j) {
        const double soft = std::exp((*logits.data)[j] - hi) / z;
        (*logits.grad)[j] += go * (soft - (j == label ? 1.0 : 0.0));
      }
    });
  }
  return out;
}

Tensor squared_error_sum(Graph& g, const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "squared_error_sum");
  const std::size_t n = a.numel();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (*a.data)[i] - (*b.data)[i];
    total += d * d;
  }
  Tensor out = Tensor::scalar(total, wants_grad(a) || wants_grad(b));
  if (out.requires_grad) {
    g.record([a, b, out, n]() {
      const double go = (*out.grad)[0];
      for (std::size_t i = 0; i < n; ++i) {
        const double d = 2.0 * ((*a.data)[i] - (*b.data)[i]) * go;
        if (a.requires_grad) (*a.grad)[i] += d;
        if (b.requires_grad) (*b.grad)[i] -= d;
      }
    });
  }
  return out;
}

Tensor slice(Graph& g, const Tensor& x, std::size_t offset,
             std::vector<int> shape) {
  Tensor out = Tensor::zeros(std::move(shape), wants_grad(x));
  const std::size_t n = out.numel();
  if (offset + n > x.numel())
    throw DimensionError("slice: range exceeds source tensor");
  for (std::size_t i = 0; i < n; ++i) (*out.data)[i] = (*x.data)[offset + i];
  if (out.requires_grad) {
    g.record([x, out, offset, n]() {
      for (std::size_t i = 0; i < n; ++i)
        (*x.grad)[offset + i] += (*out.grad)[i];
    });
  }
  return out;
}

Tensor detach(const Tensor& x) {
  Tensor out;
  out.shape = x.shape;
  out.data = x.data;  // values are immutable once produced
  out.requires_grad = false;
  return out;
}

}  // namespace mmb::ops
