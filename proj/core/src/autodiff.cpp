#include "wdsemu/autodiff.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

namespace wdsemu::ad {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
  }
}

using Index = std::shared_ptr<const std::vector<std::int32_t>>;

Index copy_index(std::span<const std::int32_t> idx) {
  return std::make_shared<const std::vector<std::int32_t>>(idx.begin(), idx.end());
}

}  // namespace

Tensor Tensor::column(std::span<const double> values) {
  Tensor t(values.size(), 1);
  std::copy(values.begin(), values.end(), t.data());
  return t;
}

Tensor Tensor::from_matrix(const RowMajorMatrix& m) {
  Tensor t(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  t.mat() = m;
  return t;
}

const Tensor& Var::value() const { return tape->value(*this); }

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, false, false, {}});
  return Var{this, static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::variable(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, grad_enabled_, false, {}});
  return Var{this, static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, Backward backward) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(backward));
}

Var Tape::record(Tensor value, std::span<const Var> inputs, Backward backward) {
  bool needs = false;
  if (grad_enabled_) {
    for (const Var& in : inputs) {
      if (in.tape != this) throw std::invalid_argument("Tape::record: input from another tape");
      needs = needs || nodes_[static_cast<std::size_t>(in.id)].requires_grad;
    }
  }
  nodes_.push_back(Node{std::move(value), {}, needs, false, needs ? std::move(backward) : Backward{}});
  return Var{this, static_cast<std::int32_t>(nodes_.size() - 1)};
}

Tensor& Tape::ensure_grad(std::size_t i) {
  auto& node = nodes_[i];
  if (!node.has_grad) {
    node.grad = Tensor(node.value.rows(), node.value.cols(), 0.0);
    node.has_grad = true;
  }
  return node.grad;
}

const Tensor& Tape::grad(Var v) { return ensure_grad(static_cast<std::size_t>(v.id)); }

void Tape::accumulate(Var v, const Tensor& g) {
  const auto i = static_cast<std::size_t>(v.id);
  if (!nodes_[i].requires_grad) return;
  auto& buf = ensure_grad(i);
  require_same_shape(buf, g, "accumulate");
  buf.mat() += g.mat();
}

Tensor* Tape::grad_buffer(Var v) {
  const auto i = static_cast<std::size_t>(v.id);
  if (!nodes_[i].requires_grad) return nullptr;
  return &ensure_grad(i);
}

void Tape::truncate(std::size_t n) {
  if (n < nodes_.size()) nodes_.resize(n);
}

void Tape::backward(Var loss) {
  const auto root = static_cast<std::size_t>(loss.id);
  if (nodes_[root].value.size() != 1) throw std::invalid_argument("Tape::backward: loss must be a scalar");
  for (auto& node : nodes_) {
    node.has_grad = false;
    node.grad = Tensor();
  }
  if (!nodes_[root].requires_grad) return;
  ensure_grad(root)[0] = 1.0;
  for (std::size_t i = root + 1; i-- > 0;) {
    auto& node = nodes_[i];
    if (node.has_grad && node.backward) node.backward(*this, node.grad);
  }
}

Var matmul(Var x, Var w) {
  const auto& xv = x.value();
  const auto& wv = w.value();
  if (xv.cols() != wv.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Tensor y = Tensor::uninit(xv.rows(), wv.cols());
  y.mat().noalias() = xv.mat() * wv.mat();
  return x.tape->record(std::move(y), {x, w}, [x, w](Tape& t, const Tensor& g) {
    if (auto* gx = t.grad_buffer(x)) gx->mat().noalias() += g.mat() * t.value(w).mat().transpose();
    if (auto* gw = t.grad_buffer(w)) gw->mat().noalias() += t.value(x).mat().transpose() * g.mat();
  });
}

Var add(Var a, Var b) {
  require_same_shape(a.value(), b.value(), "add");
  Tensor y = Tensor::uninit(a.rows(), a.cols());
  y.mat() = a.value().mat() + b.value().mat();
  return a.tape->record(std::move(y), {a, b}, [a, b](Tape& t, const Tensor& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var sub(Var a, Var b) {
  require_same_shape(a.value(), b.value(), "sub");
  Tensor y = Tensor::uninit(a.rows(), a.cols());
  y.mat() = a.value().mat() - b.value().mat();
  return a.tape->record(std::move(y), {a, b}, [a, b](Tape& t, const Tensor& g) {
    t.accumulate(a, g);
    if (auto* gb = t.grad_buffer(b)) gb->mat() -= g.mat();
  });
}

Var scale(Var a, double s) {
  Tensor y = Tensor::uninit(a.rows(), a.cols());
  y.mat() = s * a.value().mat();
  return a.tape->record(std::move(y), {a}, [a, s](Tape& t, const Tensor& g) {
    if (auto* ga = t.grad_buffer(a)) ga->mat() += s * g.mat();
  });
}

Var mul(Var a, Var b) {
  require_same_shape(a.value(), b.value(), "mul");
  Tensor y = Tensor::uninit(a.rows(), a.cols());
  y.mat().array() = a.value().mat().array() * b.value().mat().array();
  return a.tape->record(std::move(y), {a, b}, [a, b](Tape& t, const Tensor& g) {
    if (auto* ga = t.grad_buffer(a)) ga->mat().array() += g.mat().array() * t.value(b).mat().array();
    if (auto* gb = t.grad_buffer(b)) gb->mat().array() += g.mat().array() * t.value(a).mat().array();
  });
}

Var mul_const(Var a, const Tensor& c) {
  require_same_shape(a.value(), c, "mul_const");
  Tensor y = Tensor::uninit(a.rows(), a.cols());
  y.mat().array() = a.value().mat().array() * c.mat().array();
  auto factor = std::make_shared<const Tensor>(c);
  return a.tape->record(std::move(y), {a}, [a, factor](Tape& t, const Tensor& g) {
    if (auto* ga = t.grad_buffer(a)) ga->mat().array() += g.mat().array() * factor->mat().array();
  });
}

Var relu(Var a) {
  Tensor y = Tensor::uninit(a.rows(), a.cols());
  y.mat().array() = a.value().mat().array().max(0.0);
  return a.tape->record(std::move(y), {a}, [a](Tape& t, const Tensor& g) {
    auto* ga = t.grad_buffer(a);
    if (!ga) return;
    const auto& x = t.value(a);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] > 0.0) (*ga)[i] += g[i];
    }
  });
}

double selu(double x) { return x > 0.0 ? kSeluScale * x : kSeluScale * kSeluAlpha * std::expm1(x); }

Var selu(Var a) {
  const auto x = a.value().mat().array();
  Tensor y = Tensor::uninit(a.rows(), a.cols());
  // Branch-free form so Eigen vectorizes the exponential.
  y.mat().array() = kSeluScale * x.max(0.0) + (kSeluScale * kSeluAlpha) * (x.min(0.0).exp() - 1.0);
  return a.tape->record(std::move(y), {a}, [a](Tape& t, const Tensor& g) {
    auto* ga = t.grad_buffer(a);
    if (!ga) return;
    const auto& xv = t.value(a);
    Tensor e = Tensor::uninit(xv.rows(), xv.cols());
    e.mat().array() = xv.mat().array().min(0.0).exp();
    for (std::size_t i = 0; i < xv.size(); ++i) {
      (*ga)[i] += g[i] * (xv[i] > 0.0 ? kSeluScale : kSeluScale * kSeluAlpha * e[i]);
    }
  });
}

Var signed_power(Var a, double p) {
  Tensor y = a.value();
  for (auto& v : y.values()) {
    const double s = static_cast<double>((v > 0.0) - (v < 0.0));
    v = s * std::pow(std::abs(v), p);
  }
  return a.tape->record(std::move(y), {a}, [a, p](Tape& t, const Tensor& g) {
    auto* ga = t.grad_buffer(a);
    if (!ga) return;
    const auto& x = t.value(a);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double m = std::abs(x[i]);
      if (m == 0.0) continue;  // subgradient 0 at the origin
      const double base = p < 1.0 ? std::max(m, kPowerGradClamp) : m;
      (*ga)[i] += g[i] * p * std::pow(base, p - 1.0);
    }
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw std::invalid_argument("concat_cols: row count mismatch");
    cols += p.cols();
  }
  Tensor y = Tensor::uninit(rows, cols);
  std::vector<std::size_t> offsets;
  std::size_t c0 = 0;
  for (const Var& p : parts) {
    offsets.push_back(c0);
    y.mat().middleCols(static_cast<Eigen::Index>(c0), static_cast<Eigen::Index>(p.cols())) = p.value().mat();
    c0 += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts[0].tape->record(std::move(y), parts, [inputs, offsets](Tape& t, const Tensor& g) {
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      if (auto* gp = t.grad_buffer(inputs[k])) {
        gp->mat() += g.mat().middleCols(static_cast<Eigen::Index>(offsets[k]), static_cast<Eigen::Index>(gp->cols()));
      }
    }
  });
}

Var slice_rows(Var a, std::size_t begin, std::size_t end) {
  const auto& av = a.value();
  if (begin > end || end > av.rows()) throw std::invalid_argument("slice_rows: range out of bounds");
  Tensor y = Tensor::uninit(end - begin, av.cols());
  y.mat() = av.mat().middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin));
  return a.tape->record(std::move(y), {a}, [a, begin](Tape& t, const Tensor& g) {
    if (auto* ga = t.grad_buffer(a)) {
      ga->mat().middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(g.rows())) += g.mat();
    }
  });
}

Var gather_rows(Var a, std::span<const std::int32_t> index) {
  const auto& av = a.value();
  const std::size_t cols = av.cols();
  Tensor y = Tensor::uninit(index.size(), cols);
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto src = static_cast<std::size_t>(index[i]);
    if (src >= av.rows()) throw std::invalid_argument("gather_rows: index out of range");
    std::copy_n(av.data() + src * cols, cols, y.data() + i * cols);
  }
  auto idx = copy_index(index);
  return a.tape->record(std::move(y), {a}, [a, idx](Tape& t, const Tensor& g) {
    auto* ga = t.grad_buffer(a);
    if (!ga) return;
    const std::size_t cols = g.cols();
    for (std::size_t i = 0; i < idx->size(); ++i) {
      double* dst = ga->data() + static_cast<std::size_t>((*idx)[i]) * cols;
      const double* src = g.data() + i * cols;
      for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
    }
  });
}

Var scatter_add_rows(Var a, std::span<const std::int32_t> index, std::size_t n_out) {
  const auto& av = a.value();
  if (index.size() != av.rows()) throw std::invalid_argument("scatter_add_rows: index length mismatch");
  const std::size_t cols = av.cols();
  Tensor y(n_out, cols);
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto dst = static_cast<std::size_t>(index[i]);
    if (dst >= n_out) throw std::invalid_argument("scatter_add_rows: index out of range");
    for (std::size_t c = 0; c < cols; ++c) y.data()[dst * cols + c] += av.data()[i * cols + c];
  }
  auto idx = copy_index(index);
  return a.tape->record(std::move(y), {a}, [a, idx](Tape& t, const Tensor& g) {
    auto* ga = t.grad_buffer(a);
    if (!ga) return;
    const std::size_t cols = g.cols();
    for (std::size_t i = 0; i < idx->size(); ++i) {
      const double* src = g.data() + static_cast<std::size_t>((*idx)[i]) * cols;
      double* dst = ga->data() + i * cols;
      for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
    }
  });
}

Var max_aggregate(Var messages, std::span<const std::int32_t> owner, std::size_t n_out) {
  const auto& mv = messages.value();
  if (owner.size() != mv.rows()) throw std::invalid_argument("max_aggregate: owner length mismatch");
  const std::size_t cols = mv.cols();
  Tensor y(n_out, cols, -std::numeric_limits<double>::infinity());
  auto arg = std::make_shared<std::vector<std::int32_t>>(n_out * cols, -1);
  for (std::size_t i = 0; i < owner.size(); ++i) {
    const auto o = static_cast<std::size_t>(owner[i]);
    if (o >= n_out) throw std::invalid_argument("max_aggregate: owner out of range");
    const double* src = mv.data() + i * cols;
    double* dst = y.data() + o * cols;
    std::int32_t* a = arg->data() + o * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      if (a[c] < 0 || src[c] > dst[c]) {
        dst[c] = src[c];
        a[c] = static_cast<std::int32_t>(i);
      }
    }
  }
  for (std::size_t o = 0; o < n_out; ++o) {
    if (cols > 0 && (*arg)[o * cols] < 0) {
      throw std::invalid_argument("max_aggregate: output row " + std::to_string(o) + " has no incident messages");
    }
  }
  return messages.tape->record(std::move(y), {messages}, [messages, arg](Tape& t, const Tensor& g) {
    auto* gm = t.grad_buffer(messages);
    if (!gm) return;
    const std::size_t cols = g.cols();
    for (std::size_t k = 0; k < arg->size(); ++k) {
      gm->data()[static_cast<std::size_t>((*arg)[k]) * cols + k % cols] += g[k];
    }
  });
}

Var sum(Var a) {
  Tensor y = Tensor::scalar(a.value().mat().sum());
  return a.tape->record(std::move(y), {a}, [a](Tape& t, const Tensor& g) {
    if (auto* ga = t.grad_buffer(a)) ga->mat().array() += g[0];
  });
}

Var mean_abs_diff(Var a, Var b, std::span<const std::int32_t> rows) {
  require_same_shape(a.value(), b.value(), "mean_abs_diff");
  const auto& av = a.value();
  const auto& bv = b.value();
  const std::size_t cols = av.cols();
  const double count = static_cast<double>(rows.size() * cols);
  if (count == 0.0) throw std::invalid_argument("mean_abs_diff: empty selection");
  double total = 0.0;
  for (auto r : rows) {
    for (std::size_t c = 0; c < cols; ++c) {
      total += std::abs(av(static_cast<std::size_t>(r), c) - bv(static_cast<std::size_t>(r), c));
    }
  }
  auto idx = copy_index(rows);
  return a.tape->record(Tensor::scalar(total / count), {a, b}, [a, b, idx, count](Tape& t, const Tensor& g) {
    auto* ga = t.grad_buffer(a);
    auto* gb = t.grad_buffer(b);
    const auto& av = t.value(a);
    const auto& bv = t.value(b);
    const std::size_t cols = av.cols();
    for (auto r : *idx) {
      for (std::size_t c = 0; c < cols; ++c) {
        const auto ri = static_cast<std::size_t>(r);
        const double d = av(ri, c) - bv(ri, c);
        const double s = g[0] * static_cast<double>((d > 0.0) - (d < 0.0)) / count;
        if (ga) (*ga)(ri, c) += s;
        if (gb) (*gb)(ri, c) -= s;
      }
    }
  });
}

}  // namespace wdsemu::ad
