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

// Analytic oracle suite behind `ccam verify`. Each check exercises the
// conceptor algebra through a route that is independent of the closed form
// it validates: random perturbation, gradient descent, finite differences,
// or the inverse-correlation form of NOT.

#include <cstdint>
#include <string>
#include <vector>

namespace ccam::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  // Worst observed value of the quantity the check bounds.
  double worst = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string detail;
};

// Loss of the closed-form conceptor is not beaten by any of `perturbations`
// random candidates at Frobenius distance 1e-3, on `instances` random
// (Z, alpha) pairs with M, K <= 12 and alpha in (0, 2].
CheckResult conceptor_optimality(std::uint64_t seed, int instances = 100,
                                 int perturbations = 50);

// Gradient descent on the intra-channel cost (step 1e-2, at most 10000
// iterations, stop at gradient norm < 1e-8) reaches lambda * C within 1e-5
// elementwise, for M = 2..8.
CheckResult intra_channel_minimizer(std::uint64_t seed, int instances_per_m = 3);

// Analytic intra-channel gradient against central finite differences of the
// masked-row cost (step 1e-5), relative error <= 1e-5.
CheckResult gradient_check(std::uint64_t seed, int instances = 50);

// I - Cbar against R^-1 (R^-1 + alpha^2 I)^-1 on random invertible R,
// within 1e-8, plus the exact involution negate(negate(C)) == C.
CheckResult not_identity(std::uint64_t seed, int instances = 100);

// The alpha = 0 conceptor is an idempotent projector within 1e-8.
CheckResult projector_limit(std::uint64_t seed, int instances = 100);

// Eigenvalues of a learned conceptor lie in [0, 1 - delta] with
// delta = alpha^-2 / (sigma_max + alpha^-2).
CheckResult spectral_bound(std::uint64_t seed, int instances = 100);

std::vector<CheckResult> run_all(std::uint64_t seed);

}  // namespace ccam::verify
