#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mmt/error.hpp"

namespace mmt {

// Dense 64-bit tensor. Values are stored row-major; `grad` is allocated
// lazily and always mirrors the value buffer when present.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> values;
  std::vector<double> grad;
  bool requires_grad = false;

  Tensor() = default;
  Tensor(std::vector<int> s, bool rg);

  int numel() const;
  int rows() const { return shape.empty() ? 0 : shape[0]; }
  int cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  double& at(int r, int c) { return values[static_cast<size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return values[static_cast<size_t>(r) * cols() + c]; }

  void ensure_grad();
  void zero_grad();
  std::string shape_str() const;
};

using TensorPtr = std::shared_ptr<Tensor>;

TensorPtr make_tensor(std::vector<int> shape, bool requires_grad = false);
TensorPtr make_tensor(std::vector<int> shape, std::vector<double> values,
                      bool requires_grad = false);
TensorPtr full_tensor(std::vector<int> shape, double value);
TensorPtr scalar_tensor(double value);

// Define-by-run tape. Every operation computes its result eagerly, validates
// shapes, and (while recording) pushes a closure that scatters the output
// gradient back to the inputs. The tape is rebuilt per forward pass; backward
// replays it once in reverse. Single-threaded per graph.
class Graph {
 public:
  TensorPtr matmul(const TensorPtr& a, const TensorPtr& b);
  TensorPtr add(const TensorPtr& a, const TensorPtr& b);
  TensorPtr sub(const TensorPtr& a, const TensorPtr& b);
  TensorPtr mul(const TensorPtr& a, const TensorPtr& b);
  TensorPtr scale(const TensorPtr& a, double c);
  // {K,H} + {1,H}: the row is replicated across all K rows.
  TensorPtr add_row(const TensorPtr& m, const TensorPtr& row);
  TensorPtr tanh_map(const TensorPtr& x);
  TensorPtr sigmoid_map(const TensorPtr& x);
  // 1-d input; max-subtracted for stability. Output sums to 1 within 1e-12.
  TensorPtr softmax_vec(const TensorPtr& x);
  TensorPtr concat(const std::vector<TensorPtr>& parts, int axis);
  // Single-row lookup out of a {V,E} table; gradient scatters into that row.
  TensorPtr row_select(const TensorPtr& m, int row);
  // Mean over rows; optional 0/1 weights select which rows participate.
  TensorPtr mean_rows(const TensorPtr& m, const std::vector<double>* mask = nullptr);
  TensorPtr reshape(const TensorPtr& x, std::vector<int> shape);
  TensorPtr sum(const TensorPtr& x);
  TensorPtr sum_squares(const TensorPtr& x);
  // Stable -log softmax(logits)[target] for a 1-d logits vector.
  TensorPtr cross_entropy(const TensorPtr& logits, int target);

  // Reverse pass from a scalar root. Gradients of leaves accumulate; grads of
  // tape outputs are reset first, so repeated calls are bit-identical after
  // the caller resets leaf gradients.
  void backward(const TensorPtr& root);

  void set_recording(bool on) { recording_ = on; }
  bool recording() const { return recording_; }
  size_t size() const { return tape_.size(); }

 private:
  struct Node {
    TensorPtr out;
    std::function<void()> back;
  };
  std::vector<Node> tape_;
  bool recording_ = true;

  TensorPtr result(std::vector<int> shape, bool wants_grad);
  void record(const TensorPtr& out, std::function<void()> back);
};

// Numerically stable logistic function.
double sigmoid(double x);

// log(sum(exp(v))) with max subtraction.
double log_sum_exp(const std::vector<double>& v);

// Softmax of a plain vector (no graph); used by decoding fast paths.
std::vector<double> softmax_values(const std::vector<double>& logits);
std::vector<double> log_softmax_values(const std::vector<double>& logits);

}  // namespace mmt
