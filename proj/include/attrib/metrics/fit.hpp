#pragma once

#include "attrib/core/types.hpp"

namespace attrib::metrics {

// 1 - SS_res / SS_tot with SS_tot about the target mean.
inline double r_squared(const Vector& predictions, const Vector& targets) {
  require_dims(predictions.size() == targets.size(), "r_squared: length mismatch");
  if (targets.size() < 2) throw DataError("r_squared needs at least 2 targets");
  const double mean = targets.mean();
  const double ss_tot = (targets.array() - mean).square().sum();
  const double ss_res = (targets - predictions).squaredNorm();
  if (ss_tot == 0.0) throw DataError("r_squared: constant targets");
  return 1.0 - ss_res / ss_tot;
}

// Ordinary least squares with intercept, the linear reference model.
struct LinearModel {
  Vector coefficients;
  double intercept = 0.0;

  static LinearModel fit(const Matrix& X, const Vector& y) {
    require_dims(X.rows() == y.size(), "least squares: length mismatch");
    Matrix A(X.rows(), X.cols() + 1);
    A << Vector::Ones(X.rows()), X;
    const Vector beta = A.colPivHouseholderQr().solve(y);
    LinearModel m;
    m.intercept = beta(0);
    m.coefficients = beta.tail(X.cols());
    return m;
  }

  Vector predict(const Matrix& X) const {
    require_dims(X.cols() == coefficients.size(), "linear model width mismatch");
    return (X * coefficients).array() + intercept;
  }
};

}  // namespace attrib::metrics
