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

#include "ccam/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccam/error.hpp"
#include "ccam/explain.hpp"
#include "ccam/image.hpp"
#include "ccam/metrics.hpp"
#include "ccam/record.hpp"
#include "ccam/tensor_io.hpp"
#include "ccam/verify.hpp"

namespace ccam {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Inconsistent but well-formed arguments detected after parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct ExplainArgs {
  std::string record;
  std::string mode = "comprehensive";
  std::string weights = "score";
  double alpha = kDefaultAperture;
  std::string tanh;
  std::string score_space = "softmax";
  std::string out;
};

struct EvalArgs {
  std::string manifest;
  std::size_t jobs = 1;
  std::string out;
};

struct VerifyArgs {
  unsigned long long seed = kDefaultVerifySeed;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

fs::path with_suffix(const std::string& prefix, const std::string& suffix) {
  return fs::path(prefix + suffix);
}

int run_explain(const ExplainArgs& a, std::ostream& out) {
  ExplainOptions options;
  options.mode = *parse_saliency_mode(a.mode);
  options.scheme = *parse_weight_scheme(a.weights);
  options.alpha = a.alpha;
  options.score_space = *parse_score_space(a.score_space);
  if (!a.tanh.empty()) options.tanh = (a.tanh == "on");

  const EvidenceRecord record = load_record(a.record);
  if (record.score_space != options.score_space) {
    throw UsageError("record " + a.record + " carries " +
                     std::string(to_string(record.score_space)) +
                     " scores; --score-space " + a.score_space + " cannot be served");
  }
  const auto backend = default_backend(record);
  const Explanation e = explain(record, *backend, options);

  const Tensor saliency = tensor_from(e.saliency.grid());
  const Rgb8Image overlay = render_overlay(record.input, e.saliency);
  const std::vector<std::uint8_t> overlay_bytes = encode_ppm(overlay);

  const fs::path saliency_path = with_suffix(a.out, ".saliency.cct");
  const fs::path overlay_path = with_suffix(a.out, ".overlay.ppm");
  const fs::path sidecar_path = with_suffix(a.out, ".json");
  if (saliency_path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(saliency_path.parent_path(), ec);
  }
  save_tensor(saliency_path, saliency);
  {
    std::ofstream f(overlay_path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + overlay_path.string());
    f.write(reinterpret_cast<const char*>(overlay_bytes.data()),
            static_cast<std::streamsize>(overlay_bytes.size()));
  }

  json doc;
  doc["record"] = a.record;
  doc["layer"] = record.layer;
  doc["class_index"] = record.class_index;
  doc["mode"] = a.mode;
  doc["weights"] = a.weights;
  doc["alpha"] = a.alpha;
  doc["tanh"] = resolve_tanh(options);
  doc["score_space"] = a.score_space;
  doc["input"] = {record.input.height(), record.input.width()};
  doc["feature_map"] = {record.features.spatial().height,
                        record.features.spatial().width,
                        record.features.channels()};
  doc["channel_weights"] = std::vector<double>(
      e.weights.values.data(), e.weights.values.data() + e.weights.values.size());
  json sums;
  sums["features"] = checksum(e.features.matrix());
  sums["channel_weights"] = checksum(Matrix(e.weights.values));
  if (e.intermediates) {
    const ConceptorCamResult& r = *e.intermediates;
    sums["evidence"] = checksum(r.evidence.matrix());
    sums["reversed_evidence"] = checksum(r.reversed_evidence.matrix());
    sums["positive_conceptor"] = checksum(r.positive.matrix());
    sums["reversed_conceptor"] = checksum(r.reversed.matrix());
    sums["complementary_conceptor"] = checksum(r.complementary.matrix());
  }
  sums["saliency"] = checksum(std::span<const double>(saliency.values));
  sums["overlay"] = checksum(std::span<const std::uint8_t>(overlay_bytes));
  doc["checksums"] = sums;
  write_text(sidecar_path, doc.dump(2) + "\n");

  out << "wrote " << saliency_path.string() << ", " << overlay_path.string()
      << ", " << sidecar_path.string() << "\n";
  return kExitOk;
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  const std::vector<ManifestItem> items = load_manifest(a.manifest);
  if (items.empty()) throw UsageError("manifest " + a.manifest + " is empty");
  const EvalReport report = evaluate_manifest(items, default_backend, a.jobs);
  write_text(a.out, report_json(report));
  const std::string table = report_table(report);
  write_text(a.out + ".txt", table);
  out << table;
  return kExitOk;
}

int run_verify(VerifyArgs a, std::ostream& out, std::ostream& err) {
  if (const char* env = std::getenv("CCAM_SEED"); env != nullptr && *env != '\0') {
    try {
      a.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("CCAM_SEED is not an unsigned integer: ") + env);
    }
  }
  out << "verification seed " << a.seed << "\n";
  bool ok = true;
  for (const verify::CheckResult& r : verify::run_all(a.seed)) {
    out << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(28) << r.name
        << std::right << " worst=" << std::scientific << std::setprecision(3)
        << r.worst << " tol=" << r.tolerance << std::fixed << std::setprecision(2)
        << " (" << r.seconds << " s)  " << r.detail << "\n";
    ok = ok && r.passed;
  }
  if (!ok) err << "ccam verify: at least one oracle check failed\n";
  return ok ? kExitOk : kExitVerificationFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Conceptor-based class activation mapping", "ccam"};
  app.require_subcommand(1);

  ExplainArgs ex;
  auto* explain_cmd = app.add_subcommand("explain", "Compute a saliency map for a record");
  explain_cmd->add_option("--record", ex.record, "Record directory")->required();
  explain_cmd->add_option("--mode", ex.mode, "Saliency mode")
      ->check(CLI::IsMember({"baseline", "positive", "complementary", "comprehensive"}));
  explain_cmd->add_option("--weights", ex.weights, "Channel weight scheme")
      ->check(CLI::IsMember({"score", "grad", "cam", "ingested"}));
  explain_cmd->add_option("--alpha", ex.alpha, "Aperture")->check(CLI::Range(0.0, kMaxAperture));
  explain_cmd->add_option("--tanh", ex.tanh, "Tanh feature normalization")
      ->check(CLI::IsMember({"on", "off"}));
  explain_cmd->add_option("--score-space", ex.score_space, "Class score space")
      ->check(CLI::IsMember({"softmax", "logit"}));
  explain_cmd->add_option("--out", ex.out, "Output prefix")->required();

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Average Increase / Average Drop over a manifest");
  eval_cmd->add_option("--manifest", ev.manifest, "Manifest JSON")->required();
  eval_cmd->add_option("--jobs", ev.jobs, "Worker threads")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", ev.out, "Report JSON path")->required();

  VerifyArgs vf;
  auto* verify_cmd = app.add_subcommand("verify", "Run the analytic oracle suite");
  verify_cmd->add_option("--seed", vf.seed, "RNG seed");

  std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ccam: " << e.what() << "\n\n";
    const CLI::App* ctx = &app;
    for (CLI::App* sub : app.get_subcommands()) ctx = sub;
    err << ctx->help();
    return kExitUsage;
  }

  try {
    if (*explain_cmd) return run_explain(ex, out);
    if (*eval_cmd) return run_eval(ev, out);
    if (*verify_cmd) return run_verify(vf, out, err);
  } catch (const UsageError& e) {
    err << "ccam: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "ccam: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "ccam: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "ccam: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace ccam
