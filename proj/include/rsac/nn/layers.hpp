#pragma once

#include "rsac/nn/tape.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <string>

namespace rsac::nn {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kSquashEps = 1e-6;

/// Indices of a dense layer's weight (in x out) and bias (1 x out) in a
/// ParamList.
struct DenseLayer {
  std::size_t weight = 0;
  std::size_t bias = 0;
  int in = 0;
  int out = 0;
};

/// GRU cell parameters: input weights (in x H), recurrent weights (H x H),
/// and biases (1 x H) for the update (z), reset (r) and candidate (h) gates.
struct GruLayer {
  std::size_t wz = 0, wr = 0, wh = 0;
  std::size_t uz = 0, ur = 0, uh = 0;
  std::size_t bz = 0, br = 0, bh = 0;
  int in = 0;
  int hidden = 0;
};

/// Appends a dense layer with weights uniform in +-1/sqrt(in).
template <class T>
DenseLayer add_dense(ParamList<T>& params, const std::string& name, int in, int out, Rng& rng) {
  if (in < 1 || out < 1) throw ShapeError("dense layer dims must be >= 1");
  DenseLayer layer{params.size(), params.size() + 1, in, out};
  const T bound = T(1) / std::sqrt(static_cast<T>(in));
  params.emplace_back(name + ".w", in, out);
  params.back().init_uniform(bound, rng);
  params.emplace_back(name + ".b", 1, out);
  params.back().init_uniform(bound, rng);
  return layer;
}

template <class T>
GruLayer add_gru(ParamList<T>& params, const std::string& name, int in, int hidden, Rng& rng) {
  if (in < 1 || hidden < 1) throw ShapeError("gru dims must be >= 1");
  const T bound = T(1) / std::sqrt(static_cast<T>(hidden));
  GruLayer g;
  g.in = in;
  g.hidden = hidden;
  auto add = [&](const char* suffix, int rows, int cols) {
    params.emplace_back(name + suffix, rows, cols);
    params.back().init_uniform(bound, rng);
    return params.size() - 1;
  };
  g.wz = add(".w_z", in, hidden);
  g.wr = add(".w_r", in, hidden);
  g.wh = add(".w_h", in, hidden);
  g.uz = add(".u_z", hidden, hidden);
  g.ur = add(".u_r", hidden, hidden);
  g.uh = add(".u_h", hidden, hidden);
  g.bz = add(".b_z", 1, hidden);
  g.br = add(".b_r", 1, hidden);
  g.bh = add(".b_h", 1, hidden);
  return g;
}

/// Parameters of one network placed on a tape, either trainable or frozen.
template <class T>
struct BoundParams {
  std::vector<typename Tape<T>::Var> vars;

  typename Tape<T>::Var operator[](std::size_t i) const { return vars.at(i); }
};

template <class T>
BoundParams<T> bind(Tape<T>& tape, ParamList<T>& params, bool trainable) {
  BoundParams<T> b;
  b.vars.reserve(params.size());
  for (auto& p : params) b.vars.push_back(trainable ? tape.param(p) : tape.frozen(p));
  return b;
}

template <class T>
BoundParams<T> bind_frozen(Tape<T>& tape, const ParamList<T>& params) {
  BoundParams<T> b;
  b.vars.reserve(params.size());
  for (const auto& p : params) b.vars.push_back(tape.frozen(p));
  return b;
}

template <class T>
typename Tape<T>::Var dense(Tape<T>& tape, const BoundParams<T>& p, const DenseLayer& layer,
                            typename Tape<T>::Var x) {
  if (tape.value(x).cols() != layer.in) throw ShapeError("dense input width mismatch");
  return tape.add_row(tape.matmul(x, p[layer.weight]), p[layer.bias]);
}

/// Single GRU step built from primitive tape ops:
///   z = σ(x W_z + h U_z + b_z), r = σ(x W_r + h U_r + b_r),
///   ĥ = tanh(x W_h + (r ⊙ h) U_h + b_h), h' = (1 - z) ⊙ h + z ⊙ ĥ.
template <class T>
typename Tape<T>::Var gru_step(Tape<T>& tape, const BoundParams<T>& p, const GruLayer& g,
                               typename Tape<T>::Var x, typename Tape<T>::Var h) {
  if (tape.value(x).cols() != g.in || tape.value(h).cols() != g.hidden) {
    throw ShapeError("gru_step input shape mismatch");
  }
  auto gate = [&](std::size_t w, std::size_t u, std::size_t b, typename Tape<T>::Var hh) {
    return tape.add_row(tape.add(tape.matmul(x, p[w]), tape.matmul(hh, p[u])), p[b]);
  };
  auto z = tape.sigmoid(gate(g.wz, g.uz, g.bz, h));
  auto r = tape.sigmoid(gate(g.wr, g.ur, g.br, h));
  auto cand = tape.tanh(gate(g.wh, g.uh, g.bh, tape.mul(r, h)));
  auto one_minus_z = tape.add_scalar(tape.scale(z, T(-1)), T(1));
  return tape.add(tape.mul(one_minus_z, h), tape.mul(z, cand));
}

/// Runs a GRU from a zero hidden state over left-aligned, variable-length
/// sequences and returns the hidden state after each sequence's last valid
/// frame (batch x H).
///
/// `frames` is time-major: row t * batch + b holds frame t of sample b.
/// Sample b has `lengths[b]` valid frames; beyond that its state is held.
/// Equivalent to chaining gru_step, fused into one node per sequence.
template <class T>
typename Tape<T>::Var gru_sequence(Tape<T>& tape, const BoundParams<T>& p, const GruLayer& g,
                                   typename Tape<T>::Var frames, std::span<const int> lengths) {
  using Var = typename Tape<T>::Var;
  const Eigen::Index batch = static_cast<Eigen::Index>(lengths.size());
  const Mat<T>& xv = tape.value(frames);
  if (batch == 0 || xv.rows() % batch != 0 || xv.cols() != g.in) {
    throw ShapeError("gru_sequence frame layout mismatch");
  }
  const Eigen::Index steps = xv.rows() / batch;
  const Eigen::Index H = g.hidden;
  for (int len : lengths) {
    if (len < 1 || len > steps) throw ShapeError("gru_sequence length out of range");
  }

  struct Cache {
    Mat<T> w_all;   // in x 3H
    Mat<T> u_zr;    // H x 2H
    Mat<T> u_h;     // H x H
    Mat<T> h_prev;  // steps*batch x H
    Mat<T> gates;   // steps*batch x 3H: z, r, candidate
    Mat<T> mask;    // steps x batch
  };
  auto cache = std::make_shared<Cache>();
  cache->w_all.resize(g.in, 3 * H);
  cache->w_all << tape.value(p[g.wz]), tape.value(p[g.wr]), tape.value(p[g.wh]);
  cache->u_zr.resize(H, 2 * H);
  cache->u_zr << tape.value(p[g.uz]), tape.value(p[g.ur]);
  cache->u_h = tape.value(p[g.uh]);
  Mat<T> b_all(1, 3 * H);
  b_all << tape.value(p[g.bz]), tape.value(p[g.br]), tape.value(p[g.bh]);

  Mat<T> xw = xv * cache->w_all;
  xw.rowwise() += b_all.row(0);

  cache->h_prev.resize(steps * batch, H);
  cache->gates.resize(steps * batch, 3 * H);
  cache->mask.resize(steps, batch);
  Mat<T> h = Mat<T>::Zero(batch, H);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const Eigen::Index row0 = t * batch;
    cache->h_prev.middleRows(row0, batch) = h;
    Mat<T> zr = xw.block(row0, 0, batch, 2 * H) + h * cache->u_zr;
    zr = (T(1) / (T(1) + (-zr.array()).exp())).matrix();
    const Mat<T> rh = zr.rightCols(H).cwiseProduct(h);
    Mat<T> cand = (xw.block(row0, 2 * H, batch, H) + rh * cache->u_h).array().tanh().matrix();
    cache->gates.block(row0, 0, batch, 2 * H) = zr;
    cache->gates.block(row0, 2 * H, batch, H) = cand;
    for (Eigen::Index b = 0; b < batch; ++b) {
      const bool active = t < lengths[b];
      cache->mask(t, b) = active ? T(1) : T(0);
      if (active) {
        const auto z = zr.row(b).leftCols(H).array();
        h.row(b) = ((T(1) - z) * h.row(b).array() + z * cand.row(b).array()).matrix();
      }
    }
  }

  const Var wz = p[g.wz], wr = p[g.wr], wh = p[g.wh];
  const Var uz = p[g.uz], ur = p[g.ur], uh = p[g.uh];
  const Var bz = p[g.bz], br = p[g.br], bh = p[g.bh];
  Var out = tape.custom(std::move(h), {frames, wz, wr, wh, uz, ur, uh, bz, br, bh},
                        [=](Tape<T>& tp, int self) {
    const Cache& c = *cache;
    Mat<T> dh = tp.node_grad(self);
    Mat<T> dxw(steps * batch, 3 * H);
    Mat<T> du_zr = Mat<T>::Zero(H, 2 * H);
    Mat<T> du_h = Mat<T>::Zero(H, H);
    for (Eigen::Index t = steps - 1; t >= 0; --t) {
      const Eigen::Index row0 = t * batch;
      const auto hp = c.h_prev.middleRows(row0, batch);
      const auto z = c.gates.block(row0, 0, batch, H).array();
      const auto r = c.gates.block(row0, H, batch, H).array();
      const auto cand = c.gates.block(row0, 2 * H, batch, H).array();
      const Mat<T> m = c.mask.row(t).transpose().replicate(1, H);
      const Mat<T> dh_new = dh.cwiseProduct(m);
      Mat<T> dh_prev = dh - dh_new;  // held rows pass straight through
      dh_prev.array() += dh_new.array() * (T(1) - z);
      const Mat<T> da_h = (dh_new.array() * z * (T(1) - cand * cand)).matrix();
      const Mat<T> da_z = (dh_new.array() * (cand - hp.array()) * z * (T(1) - z)).matrix();
      const Mat<T> d_rh = da_h * c.u_h.transpose();
      const Mat<T> da_r = (d_rh.array() * hp.array() * r * (T(1) - r)).matrix();
      dh_prev.array() += d_rh.array() * r;
      const Mat<T> rh = (r * hp.array()).matrix();
      du_h.noalias() += rh.transpose() * da_h;
      Mat<T> da_zr(batch, 2 * H);
      da_zr << da_z, da_r;
      du_zr.noalias() += hp.transpose() * da_zr;
      dh_prev.noalias() += da_zr * c.u_zr.transpose();
      dxw.block(row0, 0, batch, 2 * H) = da_zr;
      dxw.block(row0, 2 * H, batch, H) = da_h;
      dh = std::move(dh_prev);
    }
    if (tp.requires_grad(frames)) tp.accumulate(frames.id, dxw * c.w_all.transpose());
    if (tp.requires_grad(wz) || tp.requires_grad(wr) || tp.requires_grad(wh)) {
      const Mat<T> dw = tp.value(frames).transpose() * dxw;
      tp.accumulate(wz.id, dw.leftCols(H));
      tp.accumulate(wr.id, dw.middleCols(H, H));
      tp.accumulate(wh.id, dw.rightCols(H));
    }
    tp.accumulate(uz.id, du_zr.leftCols(H));
    tp.accumulate(ur.id, du_zr.rightCols(H));
    tp.accumulate(uh.id, du_h);
    const Mat<T> db = dxw.colwise().sum();
    tp.accumulate(bz.id, db.leftCols(H));
    tp.accumulate(br.id, db.middleCols(H, H));
    tp.accumulate(bh.id, db.rightCols(H));
  });
  return out;
}

/// Reparameterized tanh-squashed Gaussian sample.
template <class T>
struct SquashedSample {
  typename Tape<T>::Var action;    // batch x d, tanh(u)
  typename Tape<T>::Var log_prob;  // batch x 1
  typename Tape<T>::Var sigma;     // batch x d, pre-squash std
  typename Tape<T>::Var mean;      // batch x d, pre-squash mean
};

/// u = μ + σ ⊙ ε, a = tanh(u),
/// log π(a) = Σ_d [log N(u; μ, σ) - log(1 - a² + 1e-6)].
/// `log_std` is clamped to [-20, 2] before use.
template <class T>
SquashedSample<T> sample_squashed(Tape<T>& tape, typename Tape<T>::Var mean,
                                  typename Tape<T>::Var log_std, const Mat<T>& noise) {
  const Mat<T>& mv = tape.value(mean);
  if (noise.rows() != mv.rows() || noise.cols() != mv.cols() || tape.value(log_std).rows() != mv.rows() ||
      tape.value(log_std).cols() != mv.cols()) {
    throw ShapeError("sample_squashed shape mismatch");
  }
  auto ls = tape.clamp(log_std, T(kLogStdMin), T(kLogStdMax));
  auto sigma = tape.exp(ls);
  auto eps = tape.constant(noise);
  auto u = tape.add(mean, tape.mul(sigma, eps));
  auto action = tape.tanh(u);

  // log N(u; μ, σ) with (u - μ) / σ = ε exactly.
  const T half_log_2pi = T(0.5 * std::log(2.0 * std::numbers::pi));
  Mat<T> gauss_const = (T(-0.5) * noise.array().square() - half_log_2pi).matrix();
  auto log_gauss = tape.sub(tape.constant(std::move(gauss_const)), ls);
  auto one_minus_a2 = tape.add_scalar(tape.scale(tape.square(action), T(-1)), T(1 + kSquashEps));
  auto per_dim = tape.sub(log_gauss, tape.log(one_minus_a2));
  return {action, tape.row_sum(per_dim), sigma, mean};
}

}  // namespace rsac::nn
