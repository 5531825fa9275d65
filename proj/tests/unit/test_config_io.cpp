#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "subwalk/config.hpp"
#include "subwalk/error.hpp"
#include "subwalk/io.hpp"
#include "subwalk/report.hpp"

using namespace subwalk;
namespace fs = std::filesystem;

namespace {

std::string scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "subwalk_unit";
  fs::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("phi literals") {
  CHECK(parse_phi("stable:0.5").label() == "stable:0.5");
  CHECK(parse_phi(" mix:0.3,0.7 ").kind() == PhiKind::stable_mixture);
  CHECK(parse_phi("stable_mixture:0.3,0.7").beta() == 0.7);
  CHECK(parse_phi("stable_log:0.5,0.2").kind() == PhiKind::stable_log);
  CHECK(parse_phi("log_cosh:0.5").kind() == PhiKind::log_cosh);
  CHECK_THROWS_WITH_AS(parse_phi("stable:1.5"), doctest::Contains("alpha out of (0,1)"), Error);
  CHECK_THROWS_AS(parse_phi("stable"), Error);
  CHECK_THROWS_AS(parse_phi("cauchy:0.5"), Error);
  CHECK_THROWS_AS(parse_phi("stable:abc"), Error);
  CHECK_THROWS_AS(parse_phi("mix:0.3"), Error);
}

TEST_CASE("phi table files") {
  const std::string path = scratch("phi_table.csv");
  std::string text = "lambda,phi\n";
  for (int k = -12; k <= 3; ++k) {
    const double l = std::ldexp(1.0, k);
    char line[64];
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", l, std::sqrt(l));
    text += line;
  }
  write_text_file(path, text);
  const PhiSpec t = parse_phi("table:" + path);
  CHECK(t.kind() == PhiKind::user_table);
  CHECK(t(0.25) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(parse_phi("table:" + scratch("missing.csv")), Error);
}

TEST_CASE("numbers") {
  CHECK(parse_number_list("1, 2.5,1e3") == std::vector<double>{1.0, 2.5, 1000.0});
  CHECK(parse_integer("1e5", "trials") == 100000);
  CHECK_THROWS_AS(parse_integer("2.5", "trials"), Error);
  CHECK_THROWS_AS(parse_number("", "x"), Error);
  CHECK_THROWS_AS(parse_number_list("1,,2"), Error);
}

TEST_CASE("key-value config") {
  const KeyValueConfig kv = KeyValueConfig::parse(
      "# comment\nseed = 42\n\ntrials=1e4  # inline\nname = \"quoted value\"\nrerun = false\n");
  CHECK(kv.keys() == std::vector<std::string>{"seed", "trials", "name", "rerun"});
  CHECK(kv.integer_or("seed", 0) == 42);
  CHECK(kv.integer_or("trials", 0) == 10000);
  CHECK(kv.get_or("name", "") == "quoted value");
  CHECK_FALSE(kv.flag_or("rerun", true));
  CHECK(kv.number_or("absent", 1.5) == 1.5);
  CHECK_NOTHROW(kv.require_known({"seed", "trials", "name", "rerun"}));
  CHECK_THROWS_WITH_AS(kv.require_known({"seed"}), doctest::Contains("trials"), Error);
  CHECK_THROWS_AS(KeyValueConfig::parse("a = 1\na = 2\n"), Error);
  CHECK_THROWS_AS(KeyValueConfig::parse("just words\n"), Error);

  const KeyValueConfig p = KeyValueConfig::parse("phi.kind = mix\nphi.alpha = 0.3\nphi.beta = 0.7\n");
  REQUIRE(p.phi().has_value());
  CHECK(p.phi()->label() == "mix:0.3,0.7");
  CHECK_FALSE(KeyValueConfig::parse("seed = 1\n").phi().has_value());
}

TEST_CASE("report config") {
  const ReportConfig c = ReportConfig::from(KeyValueConfig::parse("seed = 7\ntrials = 5000\nonly = 1,12\n"));
  CHECK(c.seed == 7u);
  CHECK(c.trials == 5000u);
  CHECK(c.only == std::vector<int>{1, 12});
  CHECK_THROWS_AS(ReportConfig::from(KeyValueConfig::parse("bogus = 1\n")), Error);
  CHECK_THROWS_AS(ReportConfig::from(KeyValueConfig::parse("trials = 0\n")), Error);
}

TEST_CASE("digests") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const std::string path = scratch("digest.txt");
  write_text_file(path, "abc");
  CHECK(sha256_file(path) == sha256_hex("abc"));
}

TEST_CASE("weights round trip") {
  const SubordinationWeights w = weights_quadrature_terms(PhiSpec::stable(0.3), 257);
  const std::string path = scratch("weights.csv");
  write_weights(path, w, "stable:0.3");
  const std::string csv = read_text_file(path);
  CHECK(csv.rfind("m,a_m,cumulative,method\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  const SubordinationWeights back = read_weights(path);
  CHECK(back.weights == w.weights);
  CHECK(back.tail_mass == w.tail_mass);
  CHECK(back.method == w.method);
  CHECK(weights_csv(back) == csv);
}

TEST_CASE("kernel round trip") {
  for (int d : {1, 2}) {
    const LatticeKernel k = nstep_kernel_spectral(PhiSpec::stable_mixture(0.3, 0.7), d, 5, d == 1 ? 64 : 16);
    const std::string path = scratch("kernel" + std::to_string(d) + ".csv");
    write_kernel(path, k, "mix:0.3,0.7");
    const LatticeKernel back = read_kernel(path);
    CHECK(back.dim() == k.dim());
    CHECK(back.period() == k.period());
    CHECK(back.radius() == k.radius());
    CHECK(back.method() == k.method());
    CHECK(back.time() == k.time());
    CHECK(back.mass_defect() == k.mass_defect());
    CHECK(std::equal(back.cell().begin(), back.cell().end(), k.cell().begin(), k.cell().end()));
    const Json side = Json::parse(read_text_file(path + ".json"));
    CHECK(side["n"] == 5);
    CHECK(side["grid"] == k.period());
    CHECK(side["method"] == "spectral");
  }
}

TEST_CASE("json helpers") {
  CHECK(number(std::numeric_limits<double>::infinity()).is_null());
  CHECK(number(std::nan("")).is_null());
  CHECK(number(0.5) == 0.5);
  const std::string text = dump(Json{{"b", 1}, {"a", 2}});
  CHECK(text.back() == '\n');
  CHECK(text.find("\"b\"") < text.find("\"a\""));
}

TEST_CASE("manifest lists every output with its digest") {
  const std::string a = scratch("out_a.txt"), b = scratch("out_b.txt");
  write_text_file(a, "first");
  write_text_file(b, "second");
  RunManifest m;
  m.command = "weights";
  m.seeds = {1, 2};
  m.add_output(a);
  m.add_output(b);
  const Json j = m.to_json();
  REQUIRE(j["outputs"].size() == 2u);
  CHECK(j["outputs"][1]["sha256"] == sha256_hex("second"));
  CHECK(j["version"] == version_string());
  CHECK(j.contains("wall_time_seconds"));
  CHECK_THROWS_AS(m.add_output(scratch("never_written.txt")), Error);
}

TEST_CASE("cheap report criteria are deterministic") {
  ReportConfig cfg;
  cfg.only = {1, 12, 13};
  const ReportOutcome a = run_report(cfg);
  REQUIRE(a.results.size() == 3u);
  CHECK(a.all_passed());
  CHECK(a.results.back().id == 13);
  CHECK(a.json["criteria"].size() == 3u);
  CHECK_FALSE(dump(a.json).find("seconds") != std::string::npos);
  const ReportOutcome b = run_report(cfg);
  CHECK(a.digest == b.digest);
  CHECK(summary_table(a.results).find("weight oracle equivalence") != std::string::npos);
}

TEST_CASE("report names the criterion on numeric refusal") {
  ReportConfig cfg;
  cfg.only = {2};
  cfg.weight_terms = 64;
  try {
    run_report(cfg);
    FAIL("expected a numeric error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numeric);
    CHECK(std::string(e.what()).find("criterion 2") != std::string::npos);
    CHECK(std::string(e.what()).find("1e-6") != std::string::npos);
  }
}
