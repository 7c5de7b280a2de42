#include "rsac/nn/tensor.hpp"

#include "rsac/nn/adam.hpp"

#include <cmath>

namespace rsac::nn {

template <class T>
std::vector<int> ParamTensor<T>::shape() const {
  if (values.rows() == 1) return {static_cast<int>(values.cols())};
  return {static_cast<int>(values.rows()), static_cast<int>(values.cols())};
}

template <class T>
void ParamTensor<T>::init_uniform(T bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-static_cast<double>(bound), static_cast<double>(bound));
  for (Eigen::Index i = 0; i < values.size(); ++i) values.data()[i] = static_cast<T>(dist(rng));
}

template <class T>
void soft_update(ParamList<T>& target, const ParamList<T>& source, T tau) {
  if (target.size() != source.size()) throw ShapeError("soft_update: parameter list length mismatch");
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i].rows() != source[i].rows() || target[i].cols() != source[i].cols()) {
      throw ShapeError("soft_update: shape mismatch for '" + target[i].name + "'");
    }
  }
  for (std::size_t i = 0; i < target.size(); ++i) {
    target[i].values = tau * source[i].values + (T(1) - tau) * target[i].values;
  }
}

template <class T>
Adam<T>::Adam(const ParamList<T>& params, AdamConfig config) : config_(config) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const auto& p : params) {
    m_.push_back(Mat<T>::Zero(p.rows(), p.cols()));
    v_.push_back(Mat<T>::Zero(p.rows(), p.cols()));
  }
}

template <class T>
void Adam<T>::step(ParamList<T>& params) {
  if (params.size() != m_.size()) throw ShapeError("Adam: parameter list does not match optimizer state");
  for (const auto& p : params) {
    if (!p.grad.allFinite()) throw DivergenceError("non-finite gradient in '" + p.name + "'");
  }
  ++t_;
  const T lr = static_cast<T>(config_.lr);
  const T b1 = static_cast<T>(config_.beta1);
  const T b2 = static_cast<T>(config_.beta2);
  const T eps = static_cast<T>(config_.eps);
  const T bc1 = static_cast<T>(1.0 - std::pow(config_.beta1, static_cast<double>(t_)));
  const T bc2 = static_cast<T>(1.0 - std::pow(config_.beta2, static_cast<double>(t_)));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    m_[i] = b1 * m_[i] + (T(1) - b1) * p.grad;
    v_[i] = b2 * v_[i] + (T(1) - b2) * p.grad.cwiseProduct(p.grad);
    p.values.array() -= lr * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + eps);
    p.zero_grad();
  }
}

template struct ParamTensor<float>;
template struct ParamTensor<double>;
template void soft_update<float>(ParamList<float>&, const ParamList<float>&, float);
template void soft_update<double>(ParamList<double>&, const ParamList<double>&, double);
template class Adam<float>;
template class Adam<double>;

}  // namespace rsac::nn
