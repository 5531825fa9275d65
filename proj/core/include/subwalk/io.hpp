#pragma once

// CSV and JSON artifacts, run manifests and SHA-256 digests.
//
// CSV: '.' decimals in shortest round-trip form, LF line endings, one header
// row. Every CSV has a JSON sidecar (<path>.json) carrying the metadata a
// reader needs to rebuild the in-memory object.

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "subwalk/estimates.hpp"
#include "subwalk/lattice.hpp"
#include "subwalk/montecarlo.hpp"
#include "subwalk/subordination.hpp"

namespace subwalk {

using Json = nlohmann::ordered_json;

std::string version_string();

/// Writes text with LF line endings; throws a configuration error on I/O failure.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// Columns m,a_m,cumulative,method.
std::string weights_csv(const SubordinationWeights& w);
Json weights_sidecar(const SubordinationWeights& w, const std::string& phi_label);
void write_weights(const std::string& path, const SubordinationWeights& w, const std::string& phi_label);
SubordinationWeights read_weights(const std::string& path);

/// Columns x1..xd,p over the whole periodic cell in centred coordinates,
/// lexicographic order.
std::string kernel_csv(const LatticeKernel& k);
Json kernel_sidecar(const LatticeKernel& k, const std::string& phi_label);
void write_kernel(const std::string& path, const LatticeKernel& k, const std::string& phi_label);
LatticeKernel read_kernel(const std::string& path);

/// Non-finite numbers become null.
Json number(double v);
Json site_json(const Site& x, int d);
Json to_json(const RatioReport& r);
Json to_json(const MeanEstimate& m);
Json to_json(const ProbabilityEstimate& p);
Json to_json(const ExitTimeReport& r);
Json to_json(const HittingReport& r, int d);
Json to_json(const MaximalProbe& p);

/// Canonical serialization: 2-space indent, trailing LF.
std::string dump(const Json& j);

struct OutputDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  Json config = Json::object();
  std::vector<std::uint64_t> seeds;
  std::string version = version_string();
  double wall_time = 0.0;
  std::vector<OutputDigest> outputs;

  /// Records `path` and its digest.
  void add_output(const std::string& path);
  Json to_json() const;
  void write(const std::string& path) const;
};

}  // namespace subwalk
