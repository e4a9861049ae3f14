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

#pragma once

#include <cstddef>

#include "ccam/linalg.hpp"

namespace ccam {

// Channel evidence: a feature map with each channel column scaled by its
// contribution weight. Rows index the h*w spatial positions, columns index
// channels.
class EvidenceMatrix {
 public:
  EvidenceMatrix(Matrix values, std::size_t height, std::size_t width);

  // Evidence without a spatial layout, treated as an M x 1 grid.
  explicit EvidenceMatrix(Matrix values);

  const Matrix& matrix() const { return values_; }
  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t channels() const {
    return static_cast<std::size_t>(values_.cols());
  }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }

 private:
  Matrix values_;
  std::size_t height_;
  std::size_t width_;
};

// A symmetric matrix with spectrum in [0, 1] together with the aperture it
// was learned at. An aperture of zero denotes the projector limit.
//
// The complement I - C is formed once at construction and carried along, so
// negation swaps the two and negate(negate(C)) reproduces C bit for bit.
class Conceptor {
 public:
  // Validates symmetry; throws InvalidArgument otherwise.
  Conceptor(Matrix matrix, double aperture);

  const Matrix& matrix() const { return matrix_; }
  const Matrix& complement() const { return complement_; }
  double aperture() const { return aperture_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  // alpha^-2, with the convention that it is zero when alpha is zero.
  double regularizer() const;

 private:
  friend Conceptor negate(const Conceptor& c);
  Conceptor(Matrix matrix, Matrix complement, double aperture);

  Matrix matrix_;
  Matrix complement_;
  double aperture_;
};

// C = R (R + alpha^-2 I)^-1 with R = correlation(Z). At alpha = 0 returns
// the orthogonal projector R R^+ onto range(R).
Conceptor learn_conceptor(const EvidenceMatrix& z, double alpha);

// (1/K) ||Z - C Z||_F^2 + alpha^-2 ||C||_F^2. Requires a positive aperture.
double conceptor_loss(const Conceptor& c, const EvidenceMatrix& z);

// Boolean NOT: I - C, keeping the aperture.
Conceptor negate(const Conceptor& c);

// NOT written through the correlation matrix, R^-1 (R^-1 + alpha^2 I)^-1.
// Only defined for invertible R and positive alpha; throws NumericalError
// when R is singular. Kept as a cross-check for negate().
Matrix complement_from_correlation(const Matrix& r, double alpha);

// Intra-channel reconstruction cost in closed form,
//   (1/K) ||lambda Z - Chat Z||_F^2 + alpha^-2 ||Chat||_F^2,
// with lambda = M / (M - 1). Throws InvalidArgument when M < 2.
double intra_reconstruction_loss(const Matrix& chat, const EvidenceMatrix& z,
                                 double alpha);

// The same cost evaluated from its definition: the average over masked
// copies Z_{i:=0} (row i zeroed) of Z - Chat Z_{i:=0}, scaled by 1/(M-1).
double intra_reconstruction_loss_masked(const Matrix& chat,
                                        const EvidenceMatrix& z, double alpha);

// d/dChat of the intra-channel cost: -2 lambda R + 2 Chat (R + alpha^-2 I).
Matrix intra_reconstruction_gradient(const Matrix& chat,
                                     const EvidenceMatrix& z, double alpha);

// M / (M - 1).
double reconstruction_scale(std::size_t m);

}  // namespace ccam
