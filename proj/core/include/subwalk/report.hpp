#pragma once

// The acceptance sweep: thirteen numbered criteria, each producing a
// pass/fail verdict and a JSON detail block. The aggregated JSON carries no
// timings, so identical configurations give byte-identical output.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "subwalk/config.hpp"
#include "subwalk/io.hpp"

namespace subwalk {

struct ReportConfig {
  std::uint64_t seed = 20240611;
  std::size_t trials = 100000;
  int threads = 0;
  std::size_t weight_terms = std::size_t{1} << 20;
  int grid = 512;               // periodic cell for the d = 1 kernel criteria
  int harnack_grid = 16384;
  double harnack_gamma = 0.5;
  bool rerun = true;            // criterion 13 reruns 1-12 and compares digests
  std::vector<int> only;        // empty: all criteria

  static ReportConfig from(const KeyValueConfig& kv);
  static const std::vector<std::string>& keys();
  Json to_json() const;
};

struct CriterionInfo {
  int id;
  std::string name;
  double limit_seconds;  // stated runtime budget
};

const std::vector<CriterionInfo>& criteria();

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string summary;
  Json detail = Json::object();
  double seconds = 0.0;       // wall time; never written to the JSON
  double limit_seconds = 0.0;

  bool within_limit() const { return limit_seconds <= 0.0 || seconds <= limit_seconds; }
};

/// Shared, lazily built inputs (weights, samplers) for one sweep.
class ReportContext;

struct ReportOutcome {
  std::vector<CriterionResult> results;
  Json json;           // aggregated report
  std::string digest;  // SHA-256 of dump(json)
  bool all_passed() const;
};

using ProgressFn = std::function<void(const CriterionResult&)>;

/// Runs criterion `id` (1..12) against a context.
CriterionResult run_criterion(int id, ReportContext& ctx);

/// Runs the configured criteria in order. Errors propagate with the
/// criterion named in the message.
ReportOutcome run_report(const ReportConfig& cfg, const ProgressFn& progress = {});

/// Human-readable table, one line per criterion.
std::string summary_table(const std::vector<CriterionResult>& results);

class ReportContext {
 public:
  explicit ReportContext(ReportConfig cfg);
  ~ReportContext();

  const ReportConfig& config() const noexcept { return cfg_; }
  /// stable(0.5) weights with config().weight_terms terms.
  const SubordinationWeights& stable_half_weights();
  const IncrementSampler& stable_half_sampler();

 private:
  ReportConfig cfg_;
  std::unique_ptr<SubordinationWeights> weights_;
  std::unique_ptr<IncrementSampler> sampler_;
};

}  // namespace subwalk
