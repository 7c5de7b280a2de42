#pragma once

#include "rsac/nn/tensor.hpp"

#include <functional>
#include <algorithm>
#include <initializer_list>
#include <limits>
#include <utility>
#include <vector>

namespace rsac::nn {

/// Reverse-mode gradient tape over batched matrices.
///
/// Every node is created in topological order, so backward() is a single
/// reverse sweep. Nodes that do not depend on a gradient-carrying leaf
/// record no backward closure and cost nothing on the reverse sweep.
template <class T>
class Tape {
 public:
  struct Var {
    int id = -1;
  };

  using Backward = std::function<void(Tape&, int self)>;

  Tape() { nodes_.reserve(256); }

  Var constant(Mat<T> value) { return push(std::move(value), false, {}); }

  /// Leaf whose gradient is recorded (e.g. observations under attack).
  Var input(Mat<T> value) { return push(std::move(value), true, {}); }

  /// Trainable leaf: backward() accumulates into `p.grad`.
  Var param(ParamTensor<T>& p) {
    Var v = push(p.values, true, {});
    nodes_[v.id].param = &p;
    return v;
  }

  /// Parameter used as a constant; receives no gradient.
  Var frozen(const ParamTensor<T>& p) { return constant(p.values); }

  Var detach(Var x) { return constant(value(x)); }

  const Mat<T>& value(Var v) const { return nodes_.at(v.id).value; }
  /// Gradient of the last backward() target with respect to `v`; empty if
  /// `v` was not reached.
  const Mat<T>& grad(Var v) const { return nodes_.at(v.id).grad; }
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  T scalar(Var v) const {
    const Mat<T>& m = value(v);
    if (m.size() != 1) throw ShapeError("scalar() on a non 1x1 node");
    return m(0, 0);
  }
  std::size_t size() const { return nodes_.size(); }

  /// Smallest distance of a gradient-carrying input to a non-differentiable
  /// point (relu at 0, clamp bounds, minimum ties). Gradient checks skip
  /// instances where this is tiny.
  T kink_margin() const { return kink_margin_; }

  /// Reverse sweep from a 1x1 node seeded with 1.
  void backward(Var loss) {
    if (value(loss).size() != 1) throw ShapeError("backward() target must be 1x1");
    backward(loss, Mat<T>::Ones(1, 1));
  }

  void backward(Var out, const Mat<T>& seed) {
    for (auto& n : nodes_) n.grad.resize(0, 0);
    Node& root = nodes_.at(out.id);
    if (seed.rows() != root.value.rows() || seed.cols() != root.value.cols()) {
      throw ShapeError("backward seed shape mismatch");
    }
    if (!root.requires_grad) return;
    root.grad = seed;
    for (int id = out.id; id >= 0; --id) {
      Node& n = nodes_[id];
      if (n.grad.size() == 0) continue;
      if (n.backward) n.backward(*this, id);
      if (n.param != nullptr) n.param->grad += nodes_[id].grad;
    }
  }

  /// Adds `g` into the gradient of node `id` when that node carries one.
  template <class Expr>
  void accumulate(int id, const Expr& g) {
    Node& n = nodes_[id];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  const Mat<T>& node_grad(int id) const { return nodes_[id].grad; }
  const Mat<T>& node_value(int id) const { return nodes_[id].value; }

  /// Generic node: caller supplies the forward value and the reverse rule.
  Var custom(Mat<T> value, std::initializer_list<Var> parents, Backward backward) {
    bool rg = false;
    for (Var p : parents) rg = rg || requires_grad(p);
    return push(std::move(value), rg, rg ? std::move(backward) : Backward{});
  }

  // -------------------------------------------------------------------------
  // Linear algebra

  Var matmul(Var a, Var b) {
    const Mat<T>& av = value(a);
    const Mat<T>& bv = value(b);
    if (av.cols() != bv.rows()) throw ShapeError("matmul inner dimension mismatch");
    return custom(av * bv, {a, b}, [a, b](Tape& t, int self) {
      const Mat<T>& g = t.node_grad(self);
      if (t.requires_grad(a)) t.accumulate(a.id, g * t.value(b).transpose());
      if (t.requires_grad(b)) t.accumulate(b.id, t.value(a).transpose() * g);
    });
  }

  /// x + 1 * bias, with `bias` a 1 x n row.
  Var add_row(Var x, Var bias) {
    const Mat<T>& xv = value(x);
    const Mat<T>& bv = value(bias);
    if (bv.rows() != 1 || bv.cols() != xv.cols()) throw ShapeError("add_row shape mismatch");
    Mat<T> out = xv.rowwise() + bv.row(0);
    return custom(std::move(out), {x, bias}, [x, bias](Tape& t, int self) {
      const Mat<T>& g = t.node_grad(self);
      t.accumulate(x.id, g);
      if (t.requires_grad(bias)) t.accumulate(bias.id, g.colwise().sum());
    });
  }

  Var add(Var a, Var b) {
    check_same(a, b, "add");
    return custom(value(a) + value(b), {a, b}, [a, b](Tape& t, int self) {
      t.accumulate(a.id, t.node_grad(self));
      t.accumulate(b.id, t.node_grad(self));
    });
  }

  Var sub(Var a, Var b) {
    check_same(a, b, "sub");
    return custom(value(a) - value(b), {a, b}, [a, b](Tape& t, int self) {
      t.accumulate(a.id, t.node_grad(self));
      if (t.requires_grad(b)) t.accumulate(b.id, -t.node_grad(self));
    });
  }

  /// Elementwise product.
  Var mul(Var a, Var b) {
    check_same(a, b, "mul");
    return custom(value(a).cwiseProduct(value(b)), {a, b}, [a, b](Tape& t, int self) {
      const Mat<T>& g = t.node_grad(self);
      if (t.requires_grad(a)) t.accumulate(a.id, g.cwiseProduct(t.value(b)));
      if (t.requires_grad(b)) t.accumulate(b.id, g.cwiseProduct(t.value(a)));
    });
  }

  Var scale(Var x, T c) {
    return custom(value(x) * c, {x}, [x, c](Tape& t, int self) { t.accumulate(x.id, t.node_grad(self) * c); });
  }

  Var add_scalar(Var x, T c) {
    Mat<T> out = value(x).array() + c;
    return custom(std::move(out), {x}, [x](Tape& t, int self) { t.accumulate(x.id, t.node_grad(self)); });
  }

  // -------------------------------------------------------------------------
  // Elementwise nonlinearities

  Var relu(Var x) {
    note_kink(x, value(x).cwiseAbs().minCoeff());
    Mat<T> out = value(x).cwiseMax(T(0));
    return custom(std::move(out), {x}, [x](Tape& t, int self) {
      const Mat<T> mask = (t.value(x).array() > T(0)).template cast<T>();
      t.accumulate(x.id, t.node_grad(self).cwiseProduct(mask));
    });
  }

  Var tanh(Var x) {
    Mat<T> out = value(x).array().tanh();
    return custom(std::move(out), {x}, [x](Tape& t, int self) {
      const auto& y = t.node_value(self).array();
      t.accumulate(x.id, (t.node_grad(self).array() * (T(1) - y * y)).matrix());
    });
  }

  Var sigmoid(Var x) {
    Mat<T> out = (T(1) / (T(1) + (-value(x).array()).exp())).matrix();
    return custom(std::move(out), {x}, [x](Tape& t, int self) {
      const auto& y = t.node_value(self).array();
      t.accumulate(x.id, (t.node_grad(self).array() * y * (T(1) - y)).matrix());
    });
  }

  Var exp(Var x) {
    Mat<T> out = value(x).array().exp();
    return custom(std::move(out), {x}, [x](Tape& t, int self) {
      t.accumulate(x.id, t.node_grad(self).cwiseProduct(t.node_value(self)));
    });
  }

  Var log(Var x) {
    Mat<T> out = value(x).array().log();
    return custom(std::move(out), {x}, [x](Tape& t, int self) {
      t.accumulate(x.id, (t.node_grad(self).array() / t.value(x).array()).matrix());
    });
  }

  Var square(Var x) {
    Mat<T> out = value(x).array().square();
    return custom(std::move(out), {x}, [x](Tape& t, int self) {
      t.accumulate(x.id, (t.node_grad(self).array() * T(2) * t.value(x).array()).matrix());
    });
  }

  /// Hard clamp; the gradient is zero where the bound is active.
  Var clamp(Var x, T lo, T hi) {
    note_kink(x, std::min((value(x).array() - lo).abs().minCoeff(), (value(x).array() - hi).abs().minCoeff()));
    Mat<T> out = value(x).cwiseMax(lo).cwiseMin(hi);
    return custom(std::move(out), {x}, [x, lo, hi](Tape& t, int self) {
      const auto& xv = t.value(x).array();
      const Mat<T> mask = ((xv >= lo) && (xv <= hi)).template cast<T>();
      t.accumulate(x.id, t.node_grad(self).cwiseProduct(mask));
    });
  }

  /// Elementwise minimum; ties route the gradient to `a`.
  Var minimum(Var a, Var b) {
    check_same(a, b, "minimum");
    if (requires_grad(a) || requires_grad(b)) {
      kink_margin_ = std::min(kink_margin_, (value(a) - value(b)).cwiseAbs().minCoeff());
    }
    Mat<T> out = value(a).cwiseMin(value(b));
    return custom(std::move(out), {a, b}, [a, b](Tape& t, int self) {
      const Mat<T> pick_a = (t.value(a).array() <= t.value(b).array()).template cast<T>();
      const Mat<T>& g = t.node_grad(self);
      if (t.requires_grad(a)) t.accumulate(a.id, g.cwiseProduct(pick_a));
      if (t.requires_grad(b)) t.accumulate(b.id, (g.array() * (T(1) - pick_a.array())).matrix());
    });
  }

  // -------------------------------------------------------------------------
  // Structure

  Var concat_cols(std::initializer_list<Var> parts) { return concat_cols(std::vector<Var>(parts)); }

  Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols of nothing");
    const Eigen::Index rows = value(parts[0]).rows();
    Eigen::Index cols = 0;
    bool rg = false;
    for (Var p : parts) {
      if (value(p).rows() != rows) throw ShapeError("concat_cols row mismatch");
      cols += value(p).cols();
      rg = rg || requires_grad(p);
    }
    Mat<T> out(rows, cols);
    Eigen::Index offset = 0;
    for (Var p : parts) {
      out.middleCols(offset, value(p).cols()) = value(p);
      offset += value(p).cols();
    }
    Backward bw;
    if (rg) {
      bw = [parts](Tape& t, int self) {
        Eigen::Index off = 0;
        for (Var p : parts) {
          const Eigen::Index c = t.value(p).cols();
          if (t.requires_grad(p)) t.accumulate(p.id, t.node_grad(self).middleCols(off, c));
          off += c;
        }
      };
    }
    return push(std::move(out), rg, std::move(bw));
  }

  Var slice_cols(Var x, Eigen::Index start, Eigen::Index count) {
    const Mat<T>& xv = value(x);
    if (start < 0 || count < 0 || start + count > xv.cols()) throw ShapeError("slice_cols out of range");
    Mat<T> out = xv.middleCols(start, count);
    return custom(std::move(out), {x}, [x, start, count](Tape& t, int self) {
      Mat<T> g = Mat<T>::Zero(t.value(x).rows(), t.value(x).cols());
      g.middleCols(start, count) = t.node_grad(self);
      t.accumulate(x.id, g);
    });
  }

  /// B x d -> B x 1.
  Var row_sum(Var x) {
    Mat<T> out = value(x).rowwise().sum();
    return custom(std::move(out), {x}, [x](Tape& t, int self) {
      const Eigen::Index cols = t.value(x).cols();
      t.accumulate(x.id, t.node_grad(self).replicate(1, cols));
    });
  }

  /// Mean over all entries -> 1 x 1.
  Var mean(Var x) {
    const Mat<T>& xv = value(x);
    if (xv.size() == 0) throw ShapeError("mean of an empty node");
    Mat<T> out(1, 1);
    out(0, 0) = xv.mean();
    const T inv = T(1) / static_cast<T>(xv.size());
    return custom(std::move(out), {x}, [x, inv](Tape& t, int self) {
      const Mat<T>& xv2 = t.value(x);
      t.accumulate(x.id, Mat<T>::Constant(xv2.rows(), xv2.cols(), t.node_grad(self)(0, 0) * inv));
    });
  }

 private:
  struct Node {
    Mat<T> value;
    Mat<T> grad;
    bool requires_grad = false;
    ParamTensor<T>* param = nullptr;
    Backward backward;
  };

  Var push(Mat<T> value, bool requires_grad, Backward backward) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  void note_kink(Var x, T margin) {
    if (requires_grad(x)) kink_margin_ = std::min(kink_margin_, margin);
  }

  void check_same(Var a, Var b, const char* op) const {
    if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols()) {
      throw ShapeError(std::string(op) + " shape mismatch");
    }
  }

  std::vector<Node> nodes_;
  T kink_margin_ = std::numeric_limits<T>::infinity();
};

}  // namespace rsac::nn
