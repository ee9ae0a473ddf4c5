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

#include "stackcast/linear.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "stackcast/error.hpp"
#include "stackcast/kernels.hpp"
#include "stackcast/serialize.hpp"

namespace stackcast {

double LinearModel::predict_row(std::span<const double> x) const {
  if (x.size() != weights.size()) throw DataError("linear: feature count mismatch");
  return intercept + kernels::dot(weights, x);
}

std::vector<double> predict_linear(const LinearModel& m, const Matrix& x) {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = m.predict_row(x.row(i));
  return out;
}

LinearModel fit_linear(const Matrix& x, std::span<const double> y, double l2) {
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw ConfigError("linear: l2 must be a finite value >= 0");
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto p = static_cast<Eigen::Index>(x.cols());
  if (n == 0 || static_cast<std::size_t>(n) != y.size()) {
    throw DataError("fit_linear: empty or mismatched data");
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::MatrixXd xc = Eigen::Map<const RowMajor>(x.data().data(), n, p);
  Eigen::VectorXd yc = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  const Eigen::RowVectorXd x_mean = xc.colwise().mean();
  const double y_mean = yc.mean();
  xc.rowwise() -= x_mean;
  yc.array() -= y_mean;

  Eigen::VectorXd w;
  if (l2 == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
    if (qr.rank() < p) {
      throw NumericError("fit_linear: design matrix is rank deficient (rank " +
                         std::to_string(qr.rank()) + " of " + std::to_string(p) +
                         "); use l2 > 0");
    }
    w = qr.solve(yc);
  } else {
    Eigen::MatrixXd a = xc.transpose() * xc;
    a.diagonal().array() += l2;
    w = a.ldlt().solve(xc.transpose() * yc);
  }
  LinearModel m;
  m.weights.assign(w.data(), w.data() + w.size());
  m.intercept = y_mean - x_mean.dot(w);
  for (double v : m.weights) {
    if (!std::isfinite(v)) throw NumericError("fit_linear: non-finite solution");
  }
  return m;
}

nlohmann::json LinearModel::to_json() const {
  return {{"weights", encode_reals(weights)}, {"intercept", encode_real(intercept)}};
}

LinearModel LinearModel::from_json(const nlohmann::json& j) {
  return {decode_reals(j.at("weights")), decode_real(j.at("intercept"))};
}

}  // namespace stackcast
