#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace wdsemu::ad {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Leaves elements uninitialized on resize so freshly computed outputs are
/// written once. Storage is aligned so Eigen kernels take the same path for
/// every buffer, which keeps results bit-reproducible.
template <class T>
struct DefaultInitAllocator : Eigen::aligned_allocator<T> {
  template <class U>
  struct rebind {
    using other = DefaultInitAllocator<U>;
  };
  DefaultInitAllocator() = default;
  template <class U>
  DefaultInitAllocator(const DefaultInitAllocator<U>&) noexcept {}
  template <class U>
  void construct(U* p) noexcept {
    ::new (static_cast<void*>(p)) U;
  }
  template <class U, class... Args>
  void construct(U* p, Args&&... args) {
    ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
  }
};

/// Dense rank <= 2 tensor of doubles, row-major. Vectors are n x 1.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  static Tensor column(std::span<const double> values);
  static Tensor scalar(double value) { return Tensor(1, 1, value); }
  /// Contents unspecified; the caller overwrites every element.
  static Tensor uninit(std::size_t rows, std::size_t cols) {
    Tensor t;
    t.rows_ = rows;
    t.cols_ = cols;
    t.data_.resize(rows * cols);
    return t;
  }
  static Tensor from_matrix(const RowMajorMatrix& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool same_shape(const Tensor& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  Eigen::Map<RowMajorMatrix> mat() {
    return {data_.data(), static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_)};
  }
  Eigen::Map<const RowMajorMatrix> mat() const {
    return {data_.data(), static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_)};
  }
  RowMajorMatrix to_matrix() const { return mat(); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double, DefaultInitAllocator<double>> data_;
};

class Tape;

/// Handle to a tape node.
struct Var {
  Tape* tape = nullptr;
  std::int32_t id = -1;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

/// Append-only reverse-mode tape. Node inputs always precede the node, so
/// insertion order is a topological order.
class Tape {
 public:
  /// Receives the gradient of the node's output and accumulates into inputs.
  using Backward = std::function<void(Tape&, const Tensor& out_grad)>;

  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Leaf that receives a gradient (when the tape records gradients).
  Var variable(Tensor value);
  /// Adds an op node. requires_grad is derived from the inputs; the backward
  /// callback is dropped when no input needs a gradient.
  Var record(Tensor value, std::initializer_list<Var> inputs, Backward backward);
  Var record(Tensor value, std::span<const Var> inputs, Backward backward);

  const Tensor& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].value; }
  bool requires_grad(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].requires_grad; }
  /// Gradient of the last backward() target; zeros if never reached.
  const Tensor& grad(Var v);
  /// Adds g into the gradient buffer of v (no-op unless v requires grad).
  void accumulate(Var v, const Tensor& g);
  /// Direct access for ops that scatter into a gradient buffer.
  Tensor* grad_buffer(Var v);

  /// Reverse sweep from a 1x1 node. Clears earlier gradients first.
  void backward(Var loss);

  bool grad_enabled() const { return grad_enabled_; }
  std::size_t size() const { return nodes_.size(); }
  /// Drops every node recorded after the first n. Vars past n become invalid.
  void truncate(std::size_t n);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool has_grad = false;
    Backward backward;
  };
  Tensor& ensure_grad(std::size_t i);

  bool grad_enabled_;
  std::vector<Node> nodes_;
};

// Linear algebra and elementwise ops.
Var matmul(Var x, Var w);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double s);
Var mul(Var a, Var b);
/// Elementwise product with a constant tensor of the same shape.
Var mul_const(Var a, const Tensor& c);
Var relu(Var a);
Var selu(Var a);
/// sgn(a) |a|^p elementwise.
Var signed_power(Var a, double p);
Var concat_cols(std::span<const Var> parts);
Var slice_rows(Var a, std::size_t begin, std::size_t end);

// Graph-indexed ops.
/// y[i] = a[index[i]]
Var gather_rows(Var a, std::span<const std::int32_t> index);
/// y[index[i]] += a[i], y has n_out rows.
Var scatter_add_rows(Var a, std::span<const std::int32_t> index, std::size_t n_out);
/// Per output row, columnwise max over the rows i with owner[i] == row.
/// Ties go to the first row encountered; the gradient follows the argmax.
/// Throws std::invalid_argument if an output row has no members.
Var max_aggregate(Var messages, std::span<const std::int32_t> owner, std::size_t n_out);

// Reductions.
Var sum(Var a);
/// Mean of |a - b| over the listed rows (all columns).
Var mean_abs_diff(Var a, Var b, std::span<const std::int32_t> rows);

inline constexpr double kSeluAlpha = 1.6732632423543772848170429916717;
inline constexpr double kSeluScale = 1.0507009873554804934193349852946;
inline constexpr double kPowerGradClamp = 1e-12;

double selu(double x);

}  // namespace wdsemu::ad
