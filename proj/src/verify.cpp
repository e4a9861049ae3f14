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

#include "ccam/verify.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <random>
#include <sstream>

#include "ccam/conceptor.hpp"
#include "ccam/linalg.hpp"

namespace ccam::verify {

namespace {

using Clock = std::chrono::steady_clock;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  int size(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix out(rows, cols);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = dist(rng_);
    return out;
  }
  Matrix direction(Eigen::Index rows, Eigen::Index cols, double norm) {
    Matrix d = matrix(rows, cols);
    return d * (norm / d.norm());
  }

 private:
  std::mt19937_64 rng_;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

CheckResult finish(CheckResult r, Clock::time_point start) {
  r.seconds = seconds_since(start);
  r.passed = r.passed && r.worst <= r.tolerance;
  return r;
}

}  // namespace

CheckResult conceptor_optimality(std::uint64_t seed, int instances,
                                 int perturbations) {
  const auto start = Clock::now();
  Sampler s(seed);
  CheckResult r{.name = "conceptor-optimality", .passed = true,
                .tolerance = 1e-12};
  // worst = largest amount by which a perturbed candidate beat the optimum.
  r.worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < instances; ++t) {
    const int m = s.size(1, 12);
    const int k = s.size(1, 12);
    const double alpha = s.uniform(0.05, 2.0);
    const EvidenceMatrix z(s.matrix(m, k));
    const Conceptor c = learn_conceptor(z, alpha);
    const double best = conceptor_loss(c, z);
    for (int p = 0; p < perturbations; ++p) {
      const Matrix cand = c.matrix() + s.direction(m, m, 1e-3);
      // The loss is defined for any square matrix; symmetry is not needed.
      const Matrix& zm = z.matrix();
      const double loss = frobenius_sq(zm - cand * zm) / k +
                          frobenius_sq(cand) / (alpha * alpha);
      r.worst = std::max(r.worst, best - loss);
    }
  }
  std::ostringstream os;
  os << instances << " instances x " << perturbations
     << " perturbations, max improvement over closed form " << r.worst;
  r.detail = os.str();
  return finish(r, start);
}

CheckResult intra_channel_minimizer(std::uint64_t seed, int instances_per_m) {
  const auto start = Clock::now();
  Sampler s(seed);
  CheckResult r{.name = "intra-channel-minimizer", .passed = true,
                .tolerance = 1e-5};
  constexpr double kStep = 1e-2;
  constexpr int kMaxIterations = 10000;
  constexpr double kGradTol = 1e-8;
  int unconverged = 0;
  for (int m = 2; m <= 8; ++m) {
    for (int t = 0; t < instances_per_m; ++t) {
      const int k = s.size(1, 12);
      const double alpha = s.uniform(0.5, 2.0);
      const EvidenceMatrix z(s.matrix(m, k));
      Matrix chat = s.matrix(m, m);
      bool converged = false;
      for (int it = 0; it < kMaxIterations; ++it) {
        const Matrix g = intra_reconstruction_gradient(chat, z, alpha);
        if (g.norm() < kGradTol) {
          converged = true;
          break;
        }
        chat -= kStep * g;
      }
      if (!converged) ++unconverged;
      const Matrix expected =
          reconstruction_scale(static_cast<std::size_t>(m)) *
          learn_conceptor(z, alpha).matrix();
      r.worst = std::max(r.worst, (chat - expected).cwiseAbs().maxCoeff());
    }
  }
  std::ostringstream os;
  os << "M=2..8, max elementwise deviation from lambda*C " << r.worst;
  if (unconverged > 0) os << " (" << unconverged << " runs hit the iteration cap)";
  r.detail = os.str();
  return finish(r, start);
}

CheckResult gradient_check(std::uint64_t seed, int instances) {
  const auto start = Clock::now();
  Sampler s(seed);
  CheckResult r{.name = "gradient-finite-difference", .passed = true,
                .tolerance = 1e-5};
  constexpr double h = 1e-5;
  for (int t = 0; t < instances; ++t) {
    const int m = s.size(2, 8);
    const int k = s.size(1, 10);
    const double alpha = s.uniform(0.3, 2.0);
    const EvidenceMatrix z(s.matrix(m, k));
    const Matrix chat = s.matrix(m, m);
    const Matrix analytic = intra_reconstruction_gradient(chat, z, alpha);
    Matrix numeric(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        Matrix plus = chat;
        Matrix minus = chat;
        plus(i, j) += h;
        minus(i, j) -= h;
        numeric(i, j) = (intra_reconstruction_loss_masked(plus, z, alpha) -
                         intra_reconstruction_loss_masked(minus, z, alpha)) /
                        (2.0 * h);
      }
    }
    const double rel =
        (numeric - analytic).norm() / std::max(analytic.norm(), 1e-12);
    r.worst = std::max(r.worst, rel);
  }
  std::ostringstream os;
  os << instances << " instances, max relative error " << r.worst;
  r.detail = os.str();
  return finish(r, start);
}

CheckResult not_identity(std::uint64_t seed, int instances) {
  const auto start = Clock::now();
  Sampler s(seed);
  CheckResult r{.name = "not-identity", .passed = true, .tolerance = 1e-8};
  bool involution = true;
  for (int t = 0; t < instances; ++t) {
    const int m = s.size(1, 10);
    const int k = m + s.size(2, 8);
    const double alpha = s.uniform(0.2, 3.0);
    // Column-rich evidence plus a small ridge keeps R well conditioned.
    Matrix rbar = correlation(s.matrix(m, k));
    rbar += 0.05 * Matrix::Identity(m, m);
    const Conceptor cbar(ridge_inverse_apply(rbar, alpha), alpha);
    const Conceptor cstar = negate(cbar);
    const Matrix reference = complement_from_correlation(rbar, alpha);
    r.worst = std::max(r.worst,
                       (cstar.matrix() - reference).cwiseAbs().maxCoeff());
    if (negate(cstar).matrix() != cbar.matrix()) involution = false;
  }
  r.passed = involution;
  std::ostringstream os;
  os << instances << " invertible correlations, max |(I - Cbar) - R^-1(R^-1 + a^2 I)^-1| "
     << r.worst << (involution ? ", involution exact" : ", involution FAILED");
  r.detail = os.str();
  return finish(r, start);
}

CheckResult projector_limit(std::uint64_t seed, int instances) {
  const auto start = Clock::now();
  Sampler s(seed);
  CheckResult r{.name = "projector-limit", .passed = true, .tolerance = 1e-8};
  for (int t = 0; t < instances; ++t) {
    const int m = s.size(1, 12);
    const int k = s.size(1, 12);
    const EvidenceMatrix z(s.matrix(m, k));
    const Matrix c = learn_conceptor(z, 0.0).matrix();
    r.worst = std::max(r.worst, (c * c - c).cwiseAbs().maxCoeff());
  }
  std::ostringstream os;
  os << instances << " instances, max |C*C - C| " << r.worst;
  r.detail = os.str();
  return finish(r, start);
}

CheckResult spectral_bound(std::uint64_t seed, int instances) {
  const auto start = Clock::now();
  Sampler s(seed);
  CheckResult r{.name = "spectral-bound", .passed = true, .tolerance = 1e-8};
  for (int t = 0; t < instances; ++t) {
    const int m = s.size(1, 12);
    const int k = s.size(1, 12);
    const double alpha = s.uniform(0.05, 5.0);
    const EvidenceMatrix z(s.matrix(m, k));
    const double reg = 1.0 / (alpha * alpha);
    const double sigma_max = sym_eigenvalues(correlation(z.matrix())).maxCoeff();
    const double upper = 1.0 - reg / (sigma_max + reg);
    const Vector ev = sym_eigenvalues(learn_conceptor(z, alpha).matrix());
    r.worst = std::max({r.worst, -ev.minCoeff(), ev.maxCoeff() - upper});
  }
  std::ostringstream os;
  os << instances << " instances, max violation of [0, 1 - delta] " << r.worst;
  r.detail = os.str();
  return finish(r, start);
}

std::vector<CheckResult> run_all(std::uint64_t seed) {
  return {
      conceptor_optimality(seed),
      intra_channel_minimizer(seed + 1),
      gradient_check(seed + 2),
      not_identity(seed + 3),
      projector_limit(seed + 4),
      spectral_bound(seed + 5),
  };
}

}  // namespace ccam::verify
