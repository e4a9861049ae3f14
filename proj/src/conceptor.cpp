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

#include "ccam/conceptor.hpp"

#include <cmath>
#include <string>

#include "ccam/error.hpp"

namespace ccam {

namespace {

void require_aperture(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("aperture must be finite and nonnegative, got " +
                          std::to_string(alpha));
  }
}

void require_square_match(const Matrix& c, const EvidenceMatrix& z,
                          const char* what) {
  if (c.rows() != c.cols() ||
      static_cast<std::size_t>(c.rows()) != z.rows()) {
    throw DimensionError(std::string(what) + ": matrix is " +
                         std::to_string(c.rows()) + "x" +
                         std::to_string(c.cols()) + ", evidence has " +
                         std::to_string(z.rows()) + " rows");
  }
}

}  // namespace

EvidenceMatrix::EvidenceMatrix(Matrix values, std::size_t height,
                               std::size_t width)
    : values_(std::move(values)), height_(height), width_(width) {
  if (height_ * width_ != static_cast<std::size_t>(values_.rows())) {
    throw DimensionError("evidence: " + std::to_string(height_) + "x" +
                         std::to_string(width_) + " grid does not match " +
                         std::to_string(values_.rows()) + " rows");
  }
}

EvidenceMatrix::EvidenceMatrix(Matrix values)
    : values_(std::move(values)),
      height_(static_cast<std::size_t>(values_.rows())),
      width_(1) {}

Conceptor::Conceptor(Matrix matrix, double aperture)
    : matrix_(std::move(matrix)), aperture_(aperture) {
  require_aperture(aperture_);
  if (!is_symmetric(matrix_)) {
    throw InvalidArgument("conceptor matrix must be symmetric");
  }
  complement_ = Matrix::Identity(matrix_.rows(), matrix_.cols()) - matrix_;
}

Conceptor::Conceptor(Matrix matrix, Matrix complement, double aperture)
    : matrix_(std::move(matrix)),
      complement_(std::move(complement)),
      aperture_(aperture) {}

double Conceptor::regularizer() const {
  return aperture_ == 0.0 ? 0.0 : 1.0 / (aperture_ * aperture_);
}

Conceptor learn_conceptor(const EvidenceMatrix& z, double alpha) {
  require_aperture(alpha);
  const Matrix r = correlation(z.matrix());
  if (alpha > 0.0) return Conceptor(ridge_inverse_apply(r, alpha), alpha);
  Matrix p = r * pseudo_inverse(r);
  p = (0.5 * (p + p.transpose())).eval();
  return Conceptor(std::move(p), 0.0);
}

double conceptor_loss(const Conceptor& c, const EvidenceMatrix& z) {
  if (!(c.aperture() > 0.0)) {
    throw InvalidArgument("conceptor_loss: aperture must be positive");
  }
  require_square_match(c.matrix(), z, "conceptor_loss");
  const Matrix& zm = z.matrix();
  const double k = static_cast<double>(zm.cols());
  return frobenius_sq(zm - c.matrix() * zm) / k +
         c.regularizer() * frobenius_sq(c.matrix());
}

Conceptor negate(const Conceptor& c) {
  return Conceptor(c.complement_, c.matrix_, c.aperture_);
}

Matrix complement_from_correlation(const Matrix& r, double alpha) {
  if (!(alpha > 0.0)) {
    throw InvalidArgument("complement_from_correlation: aperture must be positive");
  }
  if (r.rows() != r.cols()) {
    throw DimensionError("complement_from_correlation: matrix is not square");
  }
  Eigen::FullPivLU<Matrix> lu(r);
  if (!lu.isInvertible()) {
    throw NumericalError("complement_from_correlation: correlation is singular");
  }
  const Matrix r_inv = lu.inverse();
  const Matrix a =
      r_inv + alpha * alpha * Matrix::Identity(r.rows(), r.cols());
  return r_inv * a.inverse();
}

double reconstruction_scale(std::size_t m) {
  if (m < 2) {
    throw InvalidArgument("intra-channel reconstruction needs M >= 2");
  }
  const double md = static_cast<double>(m);
  return md / (md - 1.0);
}

double intra_reconstruction_loss(const Matrix& chat, const EvidenceMatrix& z,
                                 double alpha) {
  require_square_match(chat, z, "intra_reconstruction_loss");
  if (!(alpha > 0.0)) {
    throw InvalidArgument("intra_reconstruction_loss: aperture must be positive");
  }
  const double lambda = reconstruction_scale(z.rows());
  const Matrix& zm = z.matrix();
  const double k = static_cast<double>(zm.cols());
  return frobenius_sq(lambda * zm - chat * zm) / k +
         frobenius_sq(chat) / (alpha * alpha);
}

double intra_reconstruction_loss_masked(const Matrix& chat,
                                        const EvidenceMatrix& z,
                                        double alpha) {
  require_square_match(chat, z, "intra_reconstruction_loss_masked");
  if (!(alpha > 0.0)) {
    throw InvalidArgument(
        "intra_reconstruction_loss_masked: aperture must be positive");
  }
  const std::size_t m = z.rows();
  reconstruction_scale(m);
  const Matrix& zm = z.matrix();
  Matrix acc = Matrix::Zero(zm.rows(), zm.cols());
  for (std::size_t i = 0; i < m; ++i) {
    Matrix masked = zm;
    masked.row(static_cast<Eigen::Index>(i)).setZero();
    acc += zm - chat * masked;
  }
  acc /= static_cast<double>(m - 1);
  const double k = static_cast<double>(zm.cols());
  return frobenius_sq(acc) / k + frobenius_sq(chat) / (alpha * alpha);
}

Matrix intra_reconstruction_gradient(const Matrix& chat,
                                     const EvidenceMatrix& z, double alpha) {
  require_square_match(chat, z, "intra_reconstruction_gradient");
  if (!(alpha > 0.0)) {
    throw InvalidArgument(
        "intra_reconstruction_gradient: aperture must be positive");
  }
  const double lambda = reconstruction_scale(z.rows());
  const Matrix r = correlation(z.matrix());
  const Matrix a =
      r + Matrix::Identity(r.rows(), r.cols()) / (alpha * alpha);
  return -2.0 * lambda * r + 2.0 * chat * a;
}

}  // namespace ccam
