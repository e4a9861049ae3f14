/*
 * Copyright 2026 The ccam Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ccam/linalg.hpp"

#include <cmath>
#include <string>

#include "ccam/error.hpp"

namespace ccam {

namespace {

void require_symmetric(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(what) + ": matrix is " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
  }
  if (!is_symmetric(a)) {
    throw InvalidArgument(std::string(what) + ": matrix is not symmetric");
  }
}

}  // namespace

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

Matrix correlation(const Matrix& z) {
  if (z.rows() == 0 || z.cols() == 0) {
    throw DimensionError("correlation: empty evidence matrix");
  }
  Matrix r = z * z.transpose();
  r /= static_cast<double>(z.cols());
  // Z Z^T is symmetric in exact arithmetic; make it so in floating point.
  return 0.5 * (r + r.transpose());
}

Matrix ridge_inverse_apply(const Matrix& r, double alpha) {
  require_symmetric(r, "ridge_inverse_apply");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("ridge_inverse_apply: aperture must be positive and finite");
  }
  const Eigen::Index m = r.rows();
  const double reg = 1.0 / (alpha * alpha);
  const Matrix a = r + reg * Matrix::Identity(m, m);
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(
        "ridge_inverse_apply: R + alpha^-2 I is not positive definite");
  }
  // R and (R + cI)^-1 commute, so R (R + cI)^-1 = (R + cI)^-1 R.
  Matrix c = llt.solve(r);
  c = (0.5 * (c + c.transpose())).eval();
  if (!c.allFinite()) {
    throw NumericalError("ridge_inverse_apply: non-finite result");
  }
  return c;
}

Matrix pseudo_inverse(const Matrix& a) {
  if (a.size() == 0) return Matrix(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = kPinvRelativeCutoff * (s.size() > 0 ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Vector sym_eigenvalues(const Matrix& a) {
  require_symmetric(a, "sym_eigenvalues");
  if (a.size() == 0) return Vector();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("sym_eigenvalues: eigen solver did not converge");
  }
  return eig.eigenvalues();
}

double frobenius_sq(const Matrix& a) { return a.squaredNorm(); }

}  // namespace ccam
