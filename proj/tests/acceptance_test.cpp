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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Oracles here are written independently of the
// library routines they judge.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ccam/backend.hpp"
#include "ccam/cam.hpp"
#include "ccam/conceptor.hpp"
#include "ccam/metrics.hpp"
#include "ccam/record.hpp"
#include "ccam/tensor_io.hpp"
#include "ccam/toy_cnn.hpp"

namespace {

using ccam::Matrix;
using ccam::Vector;
namespace fs = std::filesystem;

constexpr std::uint64_t kSeed = 20230917ULL;

struct Outcome {
  bool passed;
  std::string detail;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  double real(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  Matrix matrix(Eigen::Index r, Eigen::Index c, double lo = -1.0, double hi = 1.0) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = real(lo, hi);
    return m;
  }

 private:
  std::mt19937_64 eng_;
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

bool bits_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

// (1/K) ||Z - C Z||^2 + a^-2 ||C||^2, written out entry by entry.
double loss_oracle(const Matrix& c, const Matrix& z, double alpha) {
  const Eigen::Index m = z.rows(), k = z.cols();
  double fit = 0.0, reg = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      double cz = 0.0;
      for (Eigen::Index l = 0; l < m; ++l) cz += c(i, l) * z(l, j);
      fit += (z(i, j) - cz) * (z(i, j) - cz);
    }
  for (Eigen::Index i = 0; i < c.size(); ++i) reg += c.data()[i] * c.data()[i];
  return fit / static_cast<double>(k) + reg / (alpha * alpha);
}

// Intra-channel cost from its definition: row i of Z is zeroed, the
// residual Z - Chat Z_{i:=0} is averaged over i with weight 1/(M-1).
double masked_cost_oracle(const Matrix& chat, const Matrix& z, double alpha) {
  const Eigen::Index m = z.rows();
  Matrix sum = Matrix::Zero(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    Matrix zi = z;
    for (Eigen::Index j = 0; j < z.cols(); ++j) zi(i, j) = 0.0;
    sum += z - chat * zi;
  }
  sum /= static_cast<double>(m - 1);
  return sum.squaredNorm() / static_cast<double>(z.cols()) +
         chat.squaredNorm() / (alpha * alpha);
}

Outcome conceptor_optimality() {
  Rng rng(kSeed);
  double worst = -1e300;
  for (int inst = 0; inst < 100; ++inst) {
    const int m = rng.integer(1, 12), k = rng.integer(1, 12);
    const Matrix z = rng.matrix(m, k, -2.0, 2.0);
    const double alpha = rng.real(0.05, 2.0);
    const ccam::Conceptor c = ccam::learn_conceptor(ccam::EvidenceMatrix(z), alpha);
    const double best = loss_oracle(c.matrix(), z, alpha);
    for (int p = 0; p < 50; ++p) {
      Matrix d = rng.matrix(m, m);
      d *= std::pow(10.0, -rng.real(1.0, 4.0)) / d.norm();
      worst = std::max(worst, best - loss_oracle(c.matrix() + d, z, alpha));
    }
  }
  return {worst <= 1e-12,
          fmt("100 instances x 50 perturbations, max(closed - perturbed) = %.3e, slack 1e-12",
              worst)};
}

Outcome intra_channel_minimizer() {
  Rng rng(kSeed + 1);
  double worst_dev = 0.0, worst_fd = 0.0;
  for (int m = 2; m <= 8; ++m) {
    for (int inst = 0; inst < 3; ++inst) {
      const int k = rng.integer(1, 8);
      const Matrix z = rng.matrix(m, k);
      const double alpha = rng.real(0.5, 2.0);
      const ccam::EvidenceMatrix ev(z);
      Matrix chat = Matrix::Zero(m, m);
      for (int it = 0; it < 10000; ++it) {
        const Matrix g = ccam::intra_reconstruction_gradient(chat, ev, alpha);
        if (g.norm() < 1e-8) break;
        chat -= 1e-2 * g;
      }
      const double lambda = static_cast<double>(m) / static_cast<double>(m - 1);
      const Matrix target = lambda * ccam::learn_conceptor(ev, alpha).matrix();
      worst_dev = std::max(worst_dev, (chat - target).cwiseAbs().maxCoeff());

      const Matrix probe = rng.matrix(m, m);
      const Matrix analytic = ccam::intra_reconstruction_gradient(probe, ev, alpha);
      Matrix numeric(m, m);
      const double h = 1e-5;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          Matrix up = probe, dn = probe;
          up(i, j) += h;
          dn(i, j) -= h;
          numeric(i, j) =
              (masked_cost_oracle(up, z, alpha) - masked_cost_oracle(dn, z, alpha)) / (2 * h);
        }
      worst_fd = std::max(worst_fd, (analytic - numeric).norm() / std::max(1.0, numeric.norm()));
    }
  }
  return {worst_dev <= 1e-5 && worst_fd <= 1e-5,
          fmt("M=2..8: max |GD - lambda C| = %.3e (tol 1e-5), gradient vs FD rel err = %.3e "
              "(tol 1e-5)",
              worst_dev, worst_fd)};
}

Outcome not_identity() {
  Rng rng(kSeed + 2);
  double worst = 0.0;
  bool involution = true;
  for (int inst = 0; inst < 100; ++inst) {
    const int m = rng.integer(1, 8);
    const Matrix zbar = rng.matrix(m, m + rng.integer(2, 8));
    const double alpha = rng.real(0.2, 3.0);
    const ccam::Conceptor cbar = ccam::learn_conceptor(ccam::EvidenceMatrix(zbar), alpha);
    const ccam::Conceptor cstar = ccam::negate(cbar);
    const Matrix rbar = zbar * zbar.transpose() / static_cast<double>(zbar.cols());
    const Matrix rinv = rbar.inverse();
    const Matrix eq = rinv * (rinv + alpha * alpha * Matrix::Identity(m, m)).inverse();
    worst = std::max(worst, (cstar.matrix() - eq).cwiseAbs().maxCoeff());
    involution = involution && bits_equal(ccam::negate(cstar).matrix(), cbar.matrix()) &&
                 bits_equal(ccam::negate(ccam::negate(cstar)).matrix(), cstar.matrix());
  }
  return {worst <= 1e-8 && involution,
          fmt("100 invertible correlations: max |NOT Cbar - Rinv(Rinv + a^2 I)^-1| = %.3e "
              "(tol 1e-8)",
              worst) +
              (involution ? ", involution bit-exact" : ", involution NOT exact")};
}

Outcome projector_limit() {
  Rng rng(kSeed + 3);
  double worst_idem = 0.0, worst_range = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int m = rng.integer(1, 10);
    const int rank = rng.integer(1, m);
    const Matrix z = rng.matrix(m, rank) * rng.matrix(rank, rng.integer(rank, 10));
    const Matrix c = ccam::learn_conceptor(ccam::EvidenceMatrix(z), 0.0).matrix();
    worst_idem = std::max(worst_idem, (c * c - c).cwiseAbs().maxCoeff());
    Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeThinU);
    const Matrix u = svd.matrixU().leftCols(rank);
    worst_range = std::max(worst_range, (c - u * u.transpose()).cwiseAbs().maxCoeff());
  }
  return {worst_idem <= 1e-8 && worst_range <= 1e-8,
          fmt("100 rank-deficient instances: max |C C - C| = %.3e, max |C - U U^T| = %.3e "
              "(tol 1e-8)",
              worst_idem, worst_range)};
}

Outcome metric_formulas() {
  const std::vector<ccam::EvalPair> items = {{0.5, 0.6}, {0.8, 0.7}};
  const double ai = ccam::average_increase(items);
  const double ad = ccam::average_drop(items);
  // AI is a count ratio and must be exact. AD takes 0.8 - 0.7, which binary
  // floating point cannot represent; 6.25 must hold to rounding of the inputs.
  const double ad_tol = 8.0 * std::numeric_limits<double>::epsilon() * 6.25;
  const bool ok = ai == 50.0 && std::abs(ad - 6.25) <= ad_tol;
  char buf[200];
  std::snprintf(buf, sizeof buf, "AI = %.17g (expect 50 exactly), AD = %.17g (expect 6.25, |err| <= %.1e)",
                ai, ad, ad_tol);
  return {ok, buf};
}

Outcome end_to_end(const fs::path& data) {
  auto spec = std::make_shared<const ccam::ToyCnnSpec>(
      ccam::ToyCnnSpec::load_json(data / "toy/model.json"));
  const ccam::Image img = ccam::Image::from_tensor(ccam::load_tensor(data / "toy/image.cct"));
  const ccam::LiveBackend live(spec, img, "relu2");
  const Vector base = live.base_scores();
  Eigen::Index cls = 0;
  base.maxCoeff(&cls);
  const ccam::ChannelWeights w =
      ccam::scorecam_weights(live.feature_map(), live, static_cast<std::size_t>(cls));
  const ccam::Extent full = img.extent();
  const auto map = [&](ccam::SaliencyMode m) {
    return ccam::compute_saliency(m, live.feature_map(), w, 1.0, full).grid();
  };
  const Matrix comprehensive = map(ccam::SaliencyMode::kComprehensive);
  const Matrix golden =
      ccam::to_matrix(ccam::load_tensor(data / "golden/saliency_comprehensive.cct"));
  const bool exact = bits_equal(ccam::narrow(comprehensive), golden);
  const Matrix baseline = map(ccam::SaliencyMode::kBaseline);
  const Matrix positive = map(ccam::SaliencyMode::kPositive);
  const auto in_range = [&](const Matrix& s) {
    return s.rows() == static_cast<Eigen::Index>(full.height) &&
           s.cols() == static_cast<Eigen::Index>(full.width) && s.minCoeff() >= 0.0 &&
           s.maxCoeff() <= 1.0;
  };
  const double d_bp = (baseline - positive).cwiseAbs().maxCoeff();
  const double d_pc = (positive - comprehensive).cwiseAbs().maxCoeff();
  const double d_bc = (baseline - comprehensive).cwiseAbs().maxCoeff();
  const bool distinct = d_bp > 0.0 && d_pc > 0.0 && d_bc > 0.0;
  const bool ranges = in_range(baseline) && in_range(positive) && in_range(comprehensive);
  std::string detail = std::string("comprehensive map ") +
                       (exact ? "bit-exact" : "DIFFERS") + " vs oracle golden; " +
                       fmt("max |baseline-positive| = %.3f, |positive-comprehensive| = %.3f",
                           d_bp, d_pc) +
                       fmt(", |baseline-comprehensive| = %.3f", d_bc);
  detail += ranges ? "; all 8x8 within [0,1]" : "; range or size violated";
  return {exact && distinct && ranges, detail};
}

Outcome replay_live(const fs::path& data) {
  auto spec = std::make_shared<const ccam::ToyCnnSpec>(
      ccam::ToyCnnSpec::load_json(data / "toy/model.json"));
  const ccam::Image img = ccam::Image::from_tensor(ccam::load_tensor(data / "toy/image.cct"));
  const ccam::LiveBackend live(spec, img, "relu2");
  const fs::path dir = fs::temp_directory_path() / "ccam_acceptance_export";
  fs::remove_all(dir);
  bool all = true;
  for (std::size_t cls = 0; cls < spec->num_classes(); ++cls) {
    ccam::save_record(live.to_record(cls), dir);
    const ccam::EvidenceRecord loaded = ccam::load_record(dir);
    const ccam::ReplayBackend replay(loaded);
    const Vector a = ccam::scorecam_weights(live.feature_map(), live, cls).values;
    const Vector b = ccam::scorecam_weights(loaded.features, replay, cls).values;
    all = all && bits_equal(a, b);
  }
  fs::remove_all(dir);
  return {all, std::string("Score-CAM weights for every class, live vs saved/loaded replay: ") +
                   (all ? "bit-exact" : "DIFFER")};
}

}  // namespace

int main() {
  const fs::path data = CCAM_TEST_DATA;
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"conceptor-optimality", 10.0, conceptor_optimality},
      {"intra-channel-minimizer+gradient", 60.0, intra_channel_minimizer},
      {"not-identity+involution", 0.0, not_identity},
      {"aperture-zero-projector", 0.0, projector_limit},
      {"metric-formulas", 0.0, metric_formulas},
      {"end-to-end-golden", 0.0, [&] { return end_to_end(data); }},
      {"replay-live-equivalence", 0.0, [&] { return replay_live(data); }},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0.0 && secs >= c.budget_seconds) {
      o.passed = false;
      o.detail += fmt("; runtime %.2f s exceeds %.0f s", secs, c.budget_seconds);
    }
    std::printf("%s %-34s %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs);
    if (!o.passed) ++failed;
  }
  std::printf("%d/%zu acceptance criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
