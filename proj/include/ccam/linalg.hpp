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

// Dense matrix substrate. All arithmetic is double precision; interchange
// files narrow to float32 only at the I/O boundary.

#include <Eigen/Dense>

namespace ccam {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSymmetryTolerance = 1e-8;
// Singular values below this fraction of the largest one are treated as zero.
inline constexpr double kPinvRelativeCutoff = 1e-10;

bool is_symmetric(const Matrix& a, double tol = kSymmetryTolerance);

bool all_finite(const Matrix& a);

// (1/K) Z Z^T for an M x K matrix Z. Throws DimensionError on empty input.
Matrix correlation(const Matrix& z);

// R (R + alpha^-2 I)^-1 computed by a Cholesky solve of (R + alpha^-2 I).
// R must be symmetric; alpha must be positive and finite.
Matrix ridge_inverse_apply(const Matrix& r, double alpha);

// Moore-Penrose pseudo-inverse with relative singular value truncation.
Matrix pseudo_inverse(const Matrix& a);

// Eigenvalues of a symmetric matrix in nondecreasing order.
Vector sym_eigenvalues(const Matrix& a);

double frobenius_sq(const Matrix& a);

}  // namespace ccam
