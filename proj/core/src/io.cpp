#include "subwalk/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "subwalk/config.hpp"
#include "subwalk/error.hpp"
#include "subwalk/format.hpp"

#ifndef SUBWALK_VERSION
#define SUBWALK_VERSION "0.0.0"
#endif

namespace subwalk {

std::string version_string() { return SUBWALK_VERSION; }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::configuration, "cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorKind::configuration, "write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::configuration, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    fail(ErrorKind::numeric, "SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_text_file(path)); }

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path,
                                                    const std::vector<std::string>& header_prefix) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::validation, path + ": empty CSV");
  const auto header = split_csv_line(line);
  for (std::size_t i = 0; i < header_prefix.size(); ++i) {
    if (i >= header.size() || header[i] != header_prefix[i]) {
      fail(ErrorKind::validation, path + ": unexpected CSV header '" + line + "'");
    }
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_csv_line(line);
    if (row.size() != header.size()) {
      fail(ErrorKind::validation, path + ": row " + std::to_string(rows.size() + 2) +
                                      " has the wrong number of fields");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json read_sidecar(const std::string& path) {
  try {
    return Json::parse(read_text_file(path + ".json"));
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::validation, path + ".json: " + e.what());
  }
}

double json_number(const Json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::validation, std::string("sidecar lacks '") + key + "'");
  if (j[key].is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j[key].get<double>();
}

}  // namespace

std::string weights_csv(const SubordinationWeights& w) {
  std::string out = "m,a_m,cumulative,method\n";
  const std::string method = to_string(w.method);
  double cumulative = 0.0;
  for (std::size_t m = 1; m <= w.terms(); ++m) {
    cumulative += w[m];
    out += std::to_string(m) + ',' + format_double(w[m]) + ',' + format_double(cumulative) + ',' +
           method + '\n';
  }
  return out;
}

Json weights_sidecar(const SubordinationWeights& w, const std::string& phi_label) {
  Json j;
  j["kind"] = "weights";
  j["phi"] = phi_label;
  j["terms"] = w.terms();
  j["method"] = to_string(w.method);
  j["tail_mass"] = number(w.tail_mass);
  j["partial_sum"] = number(w.partial_sum());
  j["tolerance"] = number(w.tolerance);
  j["tail_target_met"] = w.tail_target_met;
  j["max_error"] = number(w.max_error);
  return j;
}

void write_weights(const std::string& path, const SubordinationWeights& w, const std::string& phi_label) {
  write_text_file(path, weights_csv(w));
  write_text_file(path + ".json", dump(weights_sidecar(w, phi_label)));
}

SubordinationWeights read_weights(const std::string& path) {
  const auto rows = read_csv_rows(path, {"m", "a_m", "cumulative", "method"});
  const Json side = read_sidecar(path);
  SubordinationWeights w;
  w.weights.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (parse_integer(rows[i][0], "m") != static_cast<long>(i + 1)) {
      fail(ErrorKind::validation, path + ": weights must be listed for m = 1, 2, ...");
    }
    w.weights.push_back(parse_number(rows[i][1], "a_m"));
  }
  w.tail_mass = json_number(side, "tail_mass");
  w.tolerance = json_number(side, "tolerance");
  w.max_error = json_number(side, "max_error");
  w.tail_target_met = side.value("tail_target_met", true);
  const std::string method = side.value("method", "explicit");
  w.method = method == "quadrature" ? WeightMethod::quadrature
             : method == "series"   ? WeightMethod::series
                                    : WeightMethod::explicit_values;
  validate(w);
  return w;
}

namespace {

// Centred coordinates (-N/2, N/2] per axis (for odd N: [-(N-1)/2, (N-1)/2]).
template <class F>
void for_each_centred(int d, int period, F&& f) {
  const std::int64_t lo = -(static_cast<std::int64_t>(period) - 1) / 2;
  const std::int64_t hi = lo + period - 1;
  Site x{};
  for (int i = 0; i < d; ++i) x[i] = lo;
  for (;;) {
    f(static_cast<const Site&>(x));
    int i = d - 1;
    while (i >= 0 && x[i] == hi) x[i--] = lo;
    if (i < 0) return;
    ++x[i];
  }
}

}  // namespace

std::string kernel_csv(const LatticeKernel& k) {
  std::string out;
  for (int i = 0; i < k.dim(); ++i) out += "x" + std::to_string(i + 1) + ',';
  out += "p\n";
  for_each_centred(k.dim(), k.period(), [&](const Site& x) {
    for (int i = 0; i < k.dim(); ++i) out += std::to_string(x[i]) + ',';
    out += format_double(k(x));
    out += '\n';
  });
  return out;
}

Json kernel_sidecar(const LatticeKernel& k, const std::string& phi_label) {
  Json j;
  j["kind"] = "kernel";
  j["phi"] = phi_label;
  j["d"] = k.dim();
  j["grid"] = k.period();
  j["period"] = k.period();
  j["radius"] = k.radius();
  if (k.method() == KernelMethod::poissonized) {
    j["t"] = number(k.time());
  } else {
    j["n"] = static_cast<long>(k.time());
  }
  j["time"] = number(k.time());
  j["method"] = to_string(k.method());
  j["mass_defect"] = number(k.mass_defect());
  j["box_mass"] = number(k.box_mass());
  j["outside_mass"] = number(k.outside_mass());
  return j;
}

void write_kernel(const std::string& path, const LatticeKernel& k, const std::string& phi_label) {
  write_text_file(path, kernel_csv(k));
  write_text_file(path + ".json", dump(kernel_sidecar(k, phi_label)));
}

LatticeKernel read_kernel(const std::string& path) {
  const Json side = read_sidecar(path);
  const int d = side.at("d").get<int>();
  const int period = side.at("period").get<int>();
  std::vector<std::string> header;
  for (int i = 0; i < d; ++i) header.push_back("x" + std::to_string(i + 1));
  header.push_back("p");
  const auto rows = read_csv_rows(path, header);
  const std::string method = side.at("method").get<std::string>();
  const KernelMethod km = method == "spectral"      ? KernelMethod::spectral
                          : method == "poissonized" ? KernelMethod::poissonized
                                                    : KernelMethod::convolution;
  std::size_t size = 1;
  for (int i = 0; i < d; ++i) size *= static_cast<std::size_t>(period);
  if (rows.size() != size) fail(ErrorKind::validation, path + ": kernel CSV does not cover the cell");
  LatticeKernel shape(d, period, side.at("radius").get<int>(), km, json_number(side, "time"),
                      std::vector<double>(size, 0.0), json_number(side, "mass_defect"));
  std::vector<double> cell(size, 0.0);
  for (const auto& row : rows) {
    Site x{};
    for (int i = 0; i < d; ++i) x[i] = parse_integer(row[i], "kernel coordinate");
    cell[shape.index(x)] = parse_number(row[d], "kernel value");
  }
  return LatticeKernel(d, period, shape.radius(), km, shape.time(), std::move(cell), shape.mass_defect());
}

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json site_json(const Site& x, int d) {
  Json a = Json::array();
  for (int i = 0; i < d; ++i) a.push_back(x[i]);
  return a;
}

namespace {

Json grid_point(const GridPoint& g, int d) {
  Json j;
  j["n"] = g.n;
  j["x"] = site_json(g.x, d);
  j["value"] = number(g.value);
  j["reference"] = number(g.reference);
  return j;
}

}  // namespace

Json to_json(const RatioReport& r) {
  Json j;
  j["kind"] = r.kind;
  j["phi"] = r.phi;
  j["d"] = r.dim;
  j["grid"] = r.grid;
  j["ratio_inf"] = number(r.ratio_inf);
  j["ratio_sup"] = number(r.ratio_sup);
  j["band"] = number(r.band());
  j["argmin"] = grid_point(r.argmin, std::max(r.dim, 1));
  j["argmax"] = grid_point(r.argmax, std::max(r.dim, 1));
  j["points"] = r.points;
  j["defect_filter"] = {{"rule", "p > 10 * mass_defect"}, {"dropped", r.filtered}};
  j["method"] = r.method;
  j["seeds"] = r.seeds;
  j["degenerate"] = r.degenerate;
  j["versions"] = {{"subwalk", version_string()}};
  return j;
}

Json to_json(const MeanEstimate& m) {
  return Json{{"mean", number(m.mean)},
              {"stderr", number(m.std_error)},
              {"ci95", {number(m.lower), number(m.upper)}},
              {"samples", m.samples}};
}

Json to_json(const ProbabilityEstimate& p) {
  return Json{{"p", number(p.p)},
              {"stderr", number(p.std_error)},
              {"wilson95", {number(p.lower), number(p.upper)}},
              {"one_sided", p.one_sided},
              {"successes", p.successes},
              {"trials", p.trials}};
}

Json to_json(const ExitTimeReport& r) {
  return Json{{"r", number(r.r)},
              {"clock", r.clock == ExitClock::discrete ? "discrete" : "continuous"},
              {"tau", to_json(r.tau)},
              {"reference", number(r.reference)},
              {"ratio", number(r.ratio)},
              {"trials", r.trials},
              {"censored", r.censored},
              {"valid", r.valid}};
}

Json to_json(const HittingReport& r, int d) {
  return Json{{"start", site_json(r.start, d)},
              {"target", site_json(r.target, d)},
              {"n", r.n},
              {"distance", number(r.distance)},
              {"r_n", number(r.r_n)},
              {"bound", number(r.bound)},
              {"probability", to_json(r.probability)},
              {"ratio", number(r.ratio)},
              {"starts_inside", r.starts_inside}};
}

Json to_json(const MaximalProbe& p) {
  return Json{{"r", number(p.r)},
              {"gamma", number(p.gamma)},
              {"depth", p.depth},
              {"probability", to_json(p.probability)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void RunManifest::add_output(const std::string& path) {
  outputs.push_back(OutputDigest{path, sha256_file(path)});
}

Json RunManifest::to_json() const {
  Json j;
  j["command"] = command;
  j["config"] = config;
  j["seeds"] = seeds;
  j["version"] = version;
  j["wall_time_seconds"] = number(wall_time);
  Json outs = Json::array();
  for (const auto& o : outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
  j["outputs"] = outs;
  return j;
}

void RunManifest::write(const std::string& path) const { write_text_file(path, dump(to_json())); }

}  // namespace subwalk
