#include "mmt/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace mmt {

namespace {

int shape_numel(const std::vector<int>& shape) {
  int n = 1;
  for (int d : shape) n *= d;
  return n;
}

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape != b.shape) {
    throw DimError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                   b.shape_str());
  }
}

}  // namespace

Tensor::Tensor(std::vector<int> s, bool rg) : shape(std::move(s)), requires_grad(rg) {
  for (int d : shape) {
    if (d <= 0) throw DimError("tensor dimension must be positive, got " + shape_str());
  }
  values.assign(shape_numel(shape), 0.0);
}

int Tensor::numel() const { return static_cast<int>(values.size()); }

void Tensor::ensure_grad() {
  if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
}

void Tensor::zero_grad() { grad.assign(values.size(), 0.0); }

std::string Tensor::shape_str() const {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

TensorPtr make_tensor(std::vector<int> shape, bool requires_grad) {
  return std::make_shared<Tensor>(std::move(shape), requires_grad);
}

TensorPtr make_tensor(std::vector<int> shape, std::vector<double> values, bool requires_grad) {
  auto t = std::make_shared<Tensor>(std::move(shape), requires_grad);
  if (static_cast<int>(values.size()) != t->numel()) {
    throw DimError("value count " + std::to_string(values.size()) + " does not fill " +
                   t->shape_str());
  }
  t->values = std::move(values);
  return t;
}

TensorPtr full_tensor(std::vector<int> shape, double value) {
  auto t = std::make_shared<Tensor>(std::move(shape), false);
  std::fill(t->values.begin(), t->values.end(), value);
  return t;
}

TensorPtr scalar_tensor(double value) { return make_tensor({1}, {value}); }

TensorPtr Graph::result(std::vector<int> shape, bool wants_grad) {
  return make_tensor(std::move(shape), wants_grad && recording_);
}

void Graph::record(const TensorPtr& out, std::function<void()> back) {
  if (out->requires_grad) tape_.push_back({out, std::move(back)});
}

TensorPtr Graph::matmul(const TensorPtr& a, const TensorPtr& b) {
  if (a->shape.size() != 2 || b->shape.size() != 2 || a->shape[1] != b->shape[0]) {
    throw DimError("matmul: incompatible shapes " + a->shape_str() + " x " + b->shape_str());
  }
  const int m = a->shape[0], k = a->shape[1], n = b->shape[1];
  auto out = result({m, n}, a->requires_grad || b->requires_grad);
  for (int i = 0; i < m; ++i) {
    for (int l = 0; l < k; ++l) {
      const double av = a->values[i * k + l];
      const double* brow = &b->values[l * n];
      double* orow = &out->values[i * n];
      for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
  record(out, [a, b, out, m, k, n] {
    if (out->grad.empty()) return;
    if (a->requires_grad) {
      a->ensure_grad();
      for (int i = 0; i < m; ++i) {
        for (int l = 0; l < k; ++l) {
          double s = 0.0;
          const double* grow = &out->grad[i * n];
          const double* brow = &b->values[l * n];
          for (int j = 0; j < n; ++j) s += grow[j] * brow[j];
          a->grad[i * k + l] += s;
        }
      }
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (int l = 0; l < k; ++l) {
        for (int i = 0; i < m; ++i) {
          const double av = a->values[i * k + l];
          const double* grow = &out->grad[i * n];
          double* brow = &b->grad[l * n];
          for (int j = 0; j < n; ++j) brow[j] += av * grow[j];
        }
      }
    }
  });
  return out;
}

TensorPtr Graph::add(const TensorPtr& a, const TensorPtr& b) {
  check_same_shape("add", *a, *b);
  auto out = result(a->shape, a->requires_grad || b->requires_grad);
  for (int i = 0; i < out->numel(); ++i) out->values[i] = a->values[i] + b->values[i];
  record(out, [a, b, out] {
    if (out->grad.empty()) return;
    if (a->requires_grad) {
      a->ensure_grad();
      for (int i = 0; i < out->numel(); ++i) a->grad[i] += out->grad[i];
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (int i = 0; i < out->numel(); ++i) b->grad[i] += out->grad[i];
    }
  });
  return out;
}

TensorPtr Graph::sub(const TensorPtr& a, const TensorPtr& b) {
  check_same_shape("sub", *a, *b);
  auto out = result(a->shape, a->requires_grad || b->requires_grad);
  for (int i = 0; i < out->numel(); ++i) out->values[i] = a->values[i] - b->values[i];
  record(out, [a, b, out] {
    if (out->grad.empty()) return;
    if (a->requires_grad) {
      a->ensure_grad();
      for (int i = 0; i < out->numel(); ++i) a->grad[i] += out->grad[i];
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (int i = 0; i < out->numel(); ++i) b->grad[i] -= out->grad[i];
    }
  });
  return out;
}

TensorPtr Graph::mul(const TensorPtr& a, const TensorPtr& b) {
  check_same_shape("mul", *a, *b);
  auto out = result(a->shape, a->requires_grad || b->requires_grad);
  for (int i = 0; i < out->numel(); ++i) out->values[i] = a->values[i] * b->values[i];
  record(out, [a, b, out] {
    if (out->grad.empty()) return;
    if (a->requires_grad) {
      a->ensure_grad();
      for (int i = 0; i < out->numel(); ++i) a->grad[i] += out->grad[i] * b->values[i];
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (int i = 0; i < out->numel(); ++i) b->grad[i] += out->grad[i] * a->values[i];
    }
  });
  return out;
}

TensorPtr Graph::scale(const TensorPtr& a, double c) {
  auto out = result(a->shape, a->requires_grad);
  for (int i = 0; i < out->numel(); ++i) out->values[i] = c * a->values[i];
  record(out, [a, out, c] {
    if (out->grad.empty() || !a->requires_grad) return;
    a->ensure_grad();
    for (int i = 0; i < out->numel(); ++i) a->grad[i] += c * out->grad[i];
  });
  return out;
}

TensorPtr Graph::add_row(const TensorPtr& m, const TensorPtr& row) {
  if (m->shape.size() != 2 || row->shape.size() != 2 || row->shape[0] != 1 ||
      row->shape[1] != m->shape[1]) {
    throw DimError("add_row: incompatible shapes " + m->shape_str() + " + " + row->shape_str());
  }
  const int rows = m->shape[0], cols = m->shape[1];
  auto out = result(m->shape, m->requires_grad || row->requires_grad);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out->values[i * cols + j] = m->values[i * cols + j] + row->values[j];
  }
  record(out, [m, row, out, rows, cols] {
    if (out->grad.empty()) return;
    if (m->requires_grad) {
      m->ensure_grad();
      for (int i = 0; i < rows * cols; ++i) m->grad[i] += out->grad[i];
    }
    if (row->requires_grad) {
      row->ensure_grad();
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) row->grad[j] += out->grad[i * cols + j];
      }
    }
  });
  return out;
}

TensorPtr Graph::tanh_map(const TensorPtr& x) {
  auto out = result(x->shape, x->requires_grad);
  for (int i = 0; i < out->numel(); ++i) out->values[i] = std::tanh(x->values[i]);
  record(out, [x, out] {
    if (out->grad.empty() || !x->requires_grad) return;
    x->ensure_grad();
    for (int i = 0; i < out->numel(); ++i) {
      const double y = out->values[i];
      x->grad[i] += (1.0 - y * y) * out->grad[i];
    }
  });
  return out;
}

TensorPtr Graph::sigmoid_map(const TensorPtr& x) {
  auto out = result(x->shape, x->requires_grad);
  for (int i = 0; i < out->numel(); ++i) out->values[i] = sigmoid(x->values[i]);
  record(out, [x, out] {
    if (out->grad.empty() || !x->requires_grad) return;
    x->ensure_grad();
    for (int i = 0; i < out->numel(); ++i) {
      const double y = out->values[i];
      x->grad[i] += y * (1.0 - y) * out->grad[i];
    }
  });
  return out;
}

TensorPtr Graph::softmax_vec(const TensorPtr& x) {
  if (x->shape.size() != 1 || x->numel() < 1) {
    throw DimError("softmax_vec: expected nonempty vector, got " + x->shape_str());
  }
  auto out = result(x->shape, x->requires_grad);
  out->values = softmax_values(x->values);
  record(out, [x, out] {
    if (out->grad.empty() || !x->requires_grad) return;
    x->ensure_grad();
    double dot = 0.0;
    for (int i = 0; i < out->numel(); ++i) dot += out->grad[i] * out->values[i];
    for (int i = 0; i < out->numel(); ++i) {
      x->grad[i] += out->values[i] * (out->grad[i] - dot);
    }
  });
  return out;
}

TensorPtr Graph::concat(const std::vector<TensorPtr>& parts, int axis) {
  if (parts.empty()) throw ContractError("concat: no inputs");
  if (axis != 0 && axis != 1) throw ContractError("concat: axis must be 0 or 1");
  bool rg = false;
  for (const auto& p : parts) {
    if (p->shape.size() != 2) throw DimError("concat: expected 2-d tensor, got " + p->shape_str());
    rg = rg || p->requires_grad;
  }
  int rows = parts[0]->shape[0], cols = parts[0]->shape[1];
  int total = 0;
  for (const auto& p : parts) {
    if (axis == 0) {
      if (p->shape[1] != cols)
        throw DimError("concat: column mismatch " + p->shape_str() + " vs " + parts[0]->shape_str());
      total += p->shape[0];
    } else {
      if (p->shape[0] != rows)
        throw DimError("concat: row mismatch " + p->shape_str() + " vs " + parts[0]->shape_str());
      total += p->shape[1];
    }
  }
  auto out = result(axis == 0 ? std::vector<int>{total, cols} : std::vector<int>{rows, total}, rg);
  if (axis == 0) {
    int at = 0;
    for (const auto& p : parts) {
      std::copy(p->values.begin(), p->values.end(), out->values.begin() + at);
      at += p->numel();
    }
  } else {
    int col_at = 0;
    for (const auto& p : parts) {
      const int pc = p->shape[1];
      for (int i = 0; i < rows; ++i) {
        std::copy(&p->values[i * pc], &p->values[i * pc] + pc, &out->values[i * total + col_at]);
      }
      col_at += pc;
    }
  }
  record(out, [parts, out, axis, rows, total] {
    if (out->grad.empty()) return;
    if (axis == 0) {
      int at = 0;
      for (const auto& p : parts) {
        if (p->requires_grad) {
          p->ensure_grad();
          for (int i = 0; i < p->numel(); ++i) p->grad[i] += out->grad[at + i];
        }
        at += p->numel();
      }
    } else {
      int col_at = 0;
      for (const auto& p : parts) {
        const int pc = p->shape[1];
        if (p->requires_grad) {
          p->ensure_grad();
          for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < pc; ++j) p->grad[i * pc + j] += out->grad[i * total + col_at + j];
          }
        }
        col_at += pc;
      }
    }
  });
  return out;
}

TensorPtr Graph::row_select(const TensorPtr& m, int row) {
  if (m->shape.size() != 2) throw DimError("row_select: expected 2-d tensor, got " + m->shape_str());
  if (row < 0 || row >= m->shape[0]) {
    throw ContractError("row_select: row " + std::to_string(row) + " out of range for " +
                        m->shape_str());
  }
  const int cols = m->shape[1];
  auto out = result({1, cols}, m->requires_grad);
  std::copy(&m->values[row * cols], &m->values[row * cols] + cols, out->values.begin());
  record(out, [m, out, row, cols] {
    if (out->grad.empty() || !m->requires_grad) return;
    m->ensure_grad();
    for (int j = 0; j < cols; ++j) m->grad[row * cols + j] += out->grad[j];
  });
  return out;
}

TensorPtr Graph::mean_rows(const TensorPtr& m, const std::vector<double>* mask) {
  if (m->shape.size() != 2) throw DimError("mean_rows: expected 2-d tensor, got " + m->shape_str());
  const int rows = m->shape[0], cols = m->shape[1];
  std::vector<double> w(rows, 1.0);
  if (mask) {
    if (static_cast<int>(mask->size()) != rows) {
      throw DimError("mean_rows: mask length " + std::to_string(mask->size()) +
                     " does not match " + m->shape_str());
    }
    w = *mask;
  }
  double total = 0.0;
  for (double v : w) total += v;
  if (total <= 0.0) throw ContractError("mean_rows: mask selects no rows");
  for (double& v : w) v /= total;
  auto out = result({1, cols}, m->requires_grad);
  for (int i = 0; i < rows; ++i) {
    if (w[i] == 0.0) continue;
    for (int j = 0; j < cols; ++j) out->values[j] += w[i] * m->values[i * cols + j];
  }
  record(out, [m, out, w, rows, cols] {
    if (out->grad.empty() || !m->requires_grad) return;
    m->ensure_grad();
    for (int i = 0; i < rows; ++i) {
      if (w[i] == 0.0) continue;
      for (int j = 0; j < cols; ++j) m->grad[i * cols + j] += w[i] * out->grad[j];
    }
  });
  return out;
}

TensorPtr Graph::reshape(const TensorPtr& x, std::vector<int> shape) {
  auto out = result(std::move(shape), x->requires_grad);
  if (out->numel() != x->numel()) {
    throw DimError("reshape: cannot view " + x->shape_str() + " as " + out->shape_str());
  }
  out->values = x->values;
  record(out, [x, out] {
    if (out->grad.empty() || !x->requires_grad) return;
    x->ensure_grad();
    for (int i = 0; i < out->numel(); ++i) x->grad[i] += out->grad[i];
  });
  return out;
}

TensorPtr Graph::sum(const TensorPtr& x) {
  auto out = result({1}, x->requires_grad);
  double s = 0.0;
  for (double v : x->values) s += v;
  out->values[0] = s;
  record(out, [x, out] {
    if (out->grad.empty() || !x->requires_grad) return;
    x->ensure_grad();
    for (int i = 0; i < x->numel(); ++i) x->grad[i] += out->grad[0];
  });
  return out;
}

TensorPtr Graph::sum_squares(const TensorPtr& x) {
  auto out = result({1}, x->requires_grad);
  double s = 0.0;
  for (double v : x->values) s += v * v;
  out->values[0] = s;
  record(out, [x, out] {
    if (out->grad.empty() || !x->requires_grad) return;
    x->ensure_grad();
    for (int i = 0; i < x->numel(); ++i) x->grad[i] += 2.0 * x->values[i] * out->grad[0];
  });
  return out;
}

TensorPtr Graph::cross_entropy(const TensorPtr& logits, int target) {
  if (logits->shape.size() != 1 || logits->numel() < 1) {
    throw DimError("cross_entropy: expected nonempty vector, got " + logits->shape_str());
  }
  if (target < 0 || target >= logits->numel()) {
    throw ContractError("cross_entropy: target " + std::to_string(target) + " out of range for " +
                        logits->shape_str());
  }
  auto out = result({1}, logits->requires_grad);
  out->values[0] = log_sum_exp(logits->values) - logits->values[target];
  record(out, [logits, out, target] {
    if (out->grad.empty() || !logits->requires_grad) return;
    logits->ensure_grad();
    const auto probs = softmax_values(logits->values);
    for (int i = 0; i < logits->numel(); ++i) {
      const double indicator = (i == target) ? 1.0 : 0.0;
      logits->grad[i] += (probs[i] - indicator) * out->grad[0];
    }
  });
  return out;
}

void Graph::backward(const TensorPtr& root) {
  if (root->numel() != 1) {
    throw ContractError("backward: root must be scalar, got " + root->shape_str());
  }
  for (auto& node : tape_) node.out->zero_grad();
  root->ensure_grad();
  root->grad[0] = 1.0;
  for (auto it = tape_.rbegin(); it != tape_.rend(); ++it) it->back();
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sum_exp(const std::vector<double>& v) {
  double m = v[0];
  for (double x : v) m = std::max(m, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> softmax_values(const std::vector<double>& logits) {
  double m = logits[0];
  for (double x : logits) m = std::max(m, x);
  std::vector<double> out(logits.size());
  double s = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    s += out[i];
  }
  for (double& x : out) x /= s;
  return out;
}

std::vector<double> log_softmax_values(const std::vector<double>& logits) {
  const double lse = log_sum_exp(logits);
  std::vector<double> out(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

}  // namespace mmt
