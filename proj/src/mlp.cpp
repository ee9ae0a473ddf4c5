// Copyright 2026 The Stackcast Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stackcast/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stackcast/error.hpp"
#include "stackcast/kernels.hpp"
#include "stackcast/random.hpp"
#include "stackcast/serialize.hpp"

namespace stackcast {

void MlpArch::validate() const {
  for (int s : hidden_sizes) {
    if (s < 1) throw ConfigError("mlp: hidden layer sizes must be positive");
  }
}

void MlpTrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("mlp: learning_rate must be > 0");
  if (max_epochs < 0) throw ConfigError("mlp: max_epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("mlp: batch_size must be >= 1");
  if (!(l2_alpha >= 0.0)) throw ConfigError("mlp: l2_alpha must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("mlp: beta1 and beta2 must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("mlp: epsilon must be > 0");
}

std::size_t MlpModel::weight_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    off += static_cast<std::size_t>(sizes[l + 1]) * (static_cast<std::size_t>(sizes[l]) + 1);
  }
  return off;
}

std::size_t MlpModel::bias_offset(std::size_t layer) const {
  return weight_offset(layer) +
         static_cast<std::size_t>(sizes[layer + 1]) * static_cast<std::size_t>(sizes[layer]);
}

MlpModel MlpModel::zeros(std::span<const int> sizes) {
  if (sizes.size() < 2 || sizes.back() != 1) {
    throw std::invalid_argument("MlpModel::zeros: sizes must end with the single output unit");
  }
  MlpModel m;
  m.sizes.assign(sizes.begin(), sizes.end());
  m.params.assign(m.weight_offset(m.n_layers()), 0.0);
  m.x_mean.assign(static_cast<std::size_t>(sizes[0]), 0.0);
  m.x_scale.assign(static_cast<std::size_t>(sizes[0]), 1.0);
  return m;
}

namespace {

// Forward pass on an already-scaled input; activations[l] is the input of layer l
// (post-ReLU), activations.back() holds the output. Returns the scaled output.
double forward(const MlpModel& m, std::span<const double> z0,
               std::vector<std::vector<double>>& act) {
  const auto& k = kernels::active();
  act.resize(m.sizes.size());
  act[0].assign(z0.begin(), z0.end());
  for (std::size_t l = 0; l < m.n_layers(); ++l) {
    const auto in = static_cast<std::size_t>(m.sizes[l]);
    const auto out = static_cast<std::size_t>(m.sizes[l + 1]);
    act[l + 1].resize(out);
    k.gemv(m.params.data() + m.weight_offset(l), act[l].data(), m.params.data() + m.bias_offset(l),
           act[l + 1].data(), out, in);
    if (l + 1 < m.n_layers()) k.relu(act[l + 1].data(), out);
  }
  return act.back()[0];
}

void scale_row(const MlpModel& m, std::span<const double> x, std::vector<double>& z) {
  z.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - m.x_mean[j]) / m.x_scale[j];
}

// Add the gradient of 0.5 * scale * (out - target)^2 for one scaled row.
void backward(const MlpModel& m, const std::vector<std::vector<double>>& act, double out_grad,
              std::vector<double>& grad, std::vector<double>& delta, std::vector<double>& prev) {
  const auto& k = kernels::active();
  delta.assign(1, out_grad);
  for (std::size_t l = m.n_layers(); l-- > 0;) {
    const auto in = static_cast<std::size_t>(m.sizes[l]);
    const auto out = static_cast<std::size_t>(m.sizes[l + 1]);
    double* gw = grad.data() + m.weight_offset(l);
    double* gb = grad.data() + m.bias_offset(l);
    const double* w = m.params.data() + m.weight_offset(l);
    for (std::size_t o = 0; o < out; ++o) {
      if (delta[o] == 0.0) continue;
      k.axpy(delta[o], act[l].data(), gw + o * in, in);
      gb[o] += delta[o];
    }
    if (l == 0) break;
    prev.assign(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      if (delta[o] != 0.0) k.axpy(delta[o], w + o * in, prev.data(), in);
    }
    // ReLU derivative: active units have a positive stored activation.
    for (std::size_t i = 0; i < in; ++i) {
      if (!(act[l][i] > 0.0)) prev[i] = 0.0;
    }
    delta.swap(prev);
  }
}

double weight_norm_sq(const MlpModel& m) {
  double s = 0.0;
  for (std::size_t l = 0; l < m.n_layers(); ++l) {
    const double* w = m.params.data() + m.weight_offset(l);
    const std::size_t n = static_cast<std::size_t>(m.sizes[l]) * static_cast<std::size_t>(m.sizes[l + 1]);
    s += kernels::active().dot(w, w, n);
  }
  return s;
}

void add_l2_grad(const MlpModel& m, double alpha, std::vector<double>& grad) {
  if (alpha == 0.0) return;
  for (std::size_t l = 0; l < m.n_layers(); ++l) {
    const std::size_t off = m.weight_offset(l);
    const std::size_t n = static_cast<std::size_t>(m.sizes[l]) * static_cast<std::size_t>(m.sizes[l + 1]);
    kernels::active().axpy(alpha, m.params.data() + off, grad.data() + off, n);
  }
}

void check_width(const MlpModel& m, std::size_t cols) {
  if (cols != m.n_features()) throw DataError("mlp: feature count mismatch");
}

}  // namespace

double MlpModel::predict_row(std::span<const double> x) const {
  check_width(*this, x.size());
  std::vector<double> z;
  std::vector<std::vector<double>> act;
  scale_row(*this, x, z);
  return y_mean + y_scale * forward(*this, z, act);
}

std::vector<double> predict_mlp(const MlpModel& model, const Matrix& x) {
  check_width(model, x.cols());
  std::vector<double> out(x.rows()), z;
  std::vector<std::vector<double>> act;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    scale_row(model, x.row(i), z);
    out[i] = model.y_mean + model.y_scale * forward(model, z, act);
  }
  return out;
}

double mlp_loss(const MlpModel& model, const Matrix& x, std::span<const double> y, double l2_alpha,
                std::vector<double>* grad) {
  check_width(model, x.cols());
  if (x.rows() != y.size() || y.empty()) throw DataError("mlp_loss: batch shape mismatch");
  const double n = static_cast<double>(y.size());
  if (grad) grad->assign(model.params.size(), 0.0);
  std::vector<double> z, delta, prev;
  std::vector<std::vector<double>> act;
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    scale_row(model, x.row(i), z);
    const double r = forward(model, z, act) - (y[i] - model.y_mean) / model.y_scale;
    loss += 0.5 * r * r;
    if (grad) backward(model, act, r / n, *grad, delta, prev);
  }
  loss /= n;
  loss += 0.5 * l2_alpha * weight_norm_sq(model);
  if (grad) add_l2_grad(model, l2_alpha, *grad);
  return loss;
}

double gradient_check(const MlpModel& model, const Matrix& x, std::span<const double> y,
                      double epsilon, double l2_alpha) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw std::invalid_argument("gradient_check: epsilon must be in [1e-7, 1e-3]");
  }
  std::vector<double> analytic;
  mlp_loss(model, x, y, l2_alpha, &analytic);
  MlpModel probe = model;
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.params.size(); ++i) {
    const double saved = probe.params[i];
    probe.params[i] = saved + epsilon;
    const double up = mlp_loss(probe, x, y, l2_alpha, nullptr);
    probe.params[i] = saved - epsilon;
    const double down = mlp_loss(probe, x, y, l2_alpha, nullptr);
    probe.params[i] = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
  }
  return worst;
}

MlpModel fit_mlp(const Dataset& train, const MlpArch& arch, const MlpTrainConfig& cfg) {
  return fit_mlp(train.x(), train.y(), arch, cfg);
}

MlpModel fit_mlp(const Matrix& x, std::span<const double> y, const MlpArch& arch,
                 const MlpTrainConfig& cfg) {
  arch.validate();
  cfg.validate();
  const std::size_t n = x.rows(), p = x.cols();
  if (n == 0 || y.size() != n) throw DataError("fit_mlp: empty or mismatched training data");

  std::vector<int> sizes{static_cast<int>(p)};
  sizes.insert(sizes.end(), arch.hidden_sizes.begin(), arch.hidden_sizes.end());
  sizes.push_back(1);
  MlpModel m = MlpModel::zeros(sizes);

  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    m.x_mean[j] = mean;
    m.x_scale[j] = sd > 0.0 ? sd : 1.0;
  }
  {
    double mean = 0.0, var = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    for (double v : y) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    m.y_mean = mean;
    m.y_scale = sd > 0.0 ? sd : 1.0;
  }

  Rng rng(mix_seed(cfg.seed, 0x31f));
  for (std::size_t l = 0; l < m.n_layers(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.sizes[l]));
    const std::size_t off = m.weight_offset(l);
    const std::size_t count = static_cast<std::size_t>(m.sizes[l]) * static_cast<std::size_t>(m.sizes[l + 1]);
    for (std::size_t i = 0; i < count; ++i) m.params[off + i] = rng.uniform(-limit, limit);
  }

  // Scaled copies of the inputs and targets.
  Matrix xs(n, p);
  std::vector<double> ts(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) xs(i, j) = (x(i, j) - m.x_mean[j]) / m.x_scale[j];
    ts[i] = (y[i] - m.y_mean) / m.y_scale;
  }

  auto full_loss = [&] {
    std::vector<std::vector<double>> act;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = forward(m, xs.row(i), act) - ts[i];
      loss += 0.5 * r * r;
    }
    return loss / static_cast<double>(n) + 0.5 * cfg.l2_alpha * weight_norm_sq(m);
  };

  const std::size_t n_params = m.params.size();
  std::vector<double> grad(n_params), mom(n_params, 0.0), vel(n_params, 0.0), delta, prev;
  std::vector<std::vector<double>> act;
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  double b1t = 1.0, b2t = 1.0;
  m.loss_trace.push_back(full_loss());
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const auto order = rng.permutation(n);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      const double bn = static_cast<double>(stop - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        const double r = forward(m, xs.row(i), act) - ts[i];
        backward(m, act, r / bn, grad, delta, prev);
      }
      add_l2_grad(m, cfg.l2_alpha, grad);
      b1t *= cfg.beta1;
      b2t *= cfg.beta2;
      const kernels::AdamCoeffs c{cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon, 1.0 - b1t,
                                  1.0 - b2t};
      kernels::active().adam_step(m.params.data(), grad.data(), mom.data(), vel.data(), n_params, c);
    }
    const double loss = full_loss();
    if (!std::isfinite(loss)) {
      throw NumericError("fit_mlp: training loss became non-finite at epoch " +
                         std::to_string(epoch + 1));
    }
    m.loss_trace.push_back(loss);
  }
  return m;
}

nlohmann::json MlpModel::to_json() const {
  return {{"sizes", sizes},
          {"params", encode_reals(params)},
          {"x_mean", encode_reals(x_mean)},
          {"x_scale", encode_reals(x_scale)},
          {"y_mean", encode_real(y_mean)},
          {"y_scale", encode_real(y_scale)},
          {"loss_trace", encode_reals(loss_trace)}};
}

MlpModel MlpModel::from_json(const nlohmann::json& j) {
  MlpModel m;
  m.sizes = j.at("sizes").get<std::vector<int>>();
  m.params = decode_reals(j.at("params"));
  m.x_mean = decode_reals(j.at("x_mean"));
  m.x_scale = decode_reals(j.at("x_scale"));
  m.y_mean = decode_real(j.at("y_mean"));
  m.y_scale = decode_real(j.at("y_scale"));
  m.loss_trace = decode_reals(j.at("loss_trace"));
  if (m.sizes.size() < 2 || m.params.size() != m.weight_offset(m.n_layers()) ||
      m.x_mean.size() != m.n_features() || m.x_scale.size() != m.n_features()) {
    throw std::invalid_argument("mlp: inconsistent serialized shapes");
  }
  return m;
}

}  // namespace stackcast
