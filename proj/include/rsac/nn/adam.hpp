#pragma once

#include "rsac/nn/tensor.hpp"

namespace rsac::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam moments for one ParamList.
template <class T>
class Adam {
 public:
  Adam() = default;
  Adam(const ParamList<T>& params, AdamConfig config);

  /// Applies one step from the accumulated gradients, then clears them.
  /// Throws DivergenceError (leaving parameters untouched) if any gradient
  /// entry is non-finite.
  void step(ParamList<T>& params);

  long timestep() const { return t_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<Mat<T>>& first_moments() const { return m_; }
  const std::vector<Mat<T>>& second_moments() const { return v_; }

 private:
  AdamConfig config_{};
  std::vector<Mat<T>> m_;
  std::vector<Mat<T>> v_;
  long t_ = 0;
};

}  // namespace rsac::nn
