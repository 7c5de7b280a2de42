#pragma once

#include <Eigen/Dense>

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsac::nn {

/// Row-major dynamic matrix; rows index the batch, columns index features.
template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Rng = std::mt19937_64;

/// Raised when a loss, gradient, or parameter becomes non-finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Named trainable array. Vectors (biases) are stored as 1 x n matrices.
template <class T>
struct ParamTensor {
  std::string name;
  Mat<T> values;
  Mat<T> grad;

  ParamTensor() = default;
  ParamTensor(std::string name_, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(name_)), values(Mat<T>::Zero(rows, cols)), grad(Mat<T>::Zero(rows, cols)) {}

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  Eigen::Index size() const { return values.size(); }
  std::vector<int> shape() const;

  void zero_grad() { grad.setZero(); }
  void init_uniform(T bound, Rng& rng);
};

/// Ordered parameter collection owned by one network.
template <class T>
using ParamList = std::vector<ParamTensor<T>>;

template <class T>
std::size_t parameter_count(const ParamList<T>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += static_cast<std::size_t>(p.size());
  return n;
}

template <class T>
void zero_grads(ParamList<T>& params) {
  for (auto& p : params) p.zero_grad();
}

/// Polyak averaging: target = tau * source + (1 - tau) * target.
template <class T>
void soft_update(ParamList<T>& target, const ParamList<T>& source, T tau);

/// Converts parameter values between precisions (e.g. float checkpoints to
/// double gradient checks). Shapes must match.
template <class To, class From>
void copy_values(ParamList<To>& dst, const ParamList<From>& src) {
  if (dst.size() != src.size()) throw ShapeError("parameter list length mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (dst[i].rows() != src[i].rows() || dst[i].cols() != src[i].cols()) {
      throw ShapeError("shape mismatch for parameter '" + dst[i].name + "'");
    }
    dst[i].values = src[i].values.template cast<To>();
  }
}

}  // namespace rsac::nn
