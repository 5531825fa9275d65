#include "subwalk/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "subwalk/error.hpp"

namespace subwalk {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

double parse_number(std::string_view text, std::string_view what) {
  const std::string_view t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && t.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    fail(ErrorKind::configuration, std::string(what) + ": not a number: '" + std::string(t) + "'");
  }
  return v;
}

long parse_integer(std::string_view text, std::string_view what) {
  const std::string_view t = trim(text);
  long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    // Accept integral values written as 1e5 or 65536.0.
    const double d = parse_number(t, what);
    if (d != std::floor(d) || std::abs(d) > 9e15) {
      fail(ErrorKind::configuration, std::string(what) + ": not an integer: '" + std::string(t) + "'");
    }
    return static_cast<long>(d);
  }
  return v;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::string_view rest = text;
  for (;;) {
    const auto comma = rest.find(',');
    out.push_back(parse_number(rest.substr(0, comma), "number list"));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

PhiSpec load_phi_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::configuration, "cannot open phi table '" + path + "'");
  std::vector<double> lam, val;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (lineno == 1 && std::isalpha(static_cast<unsigned char>(t.front()))) continue;  // header
    const auto comma = t.find(',');
    if (comma == std::string_view::npos) {
      fail(ErrorKind::configuration, path + ":" + std::to_string(lineno) + ": expected lambda,phi");
    }
    lam.push_back(parse_number(t.substr(0, comma), "phi table lambda"));
    val.push_back(parse_number(t.substr(comma + 1), "phi table value"));
  }
  return PhiSpec::user_table(std::move(lam), std::move(val));
}

PhiSpec parse_phi(std::string_view literal) {
  const std::string_view t = trim(literal);
  const auto colon = t.find(':');
  if (colon == std::string_view::npos) {
    fail(ErrorKind::configuration, "phi literal must look like kind:param[,param]: got '" +
                                       std::string(t) + "'");
  }
  const std::string kind = lower(trim(t.substr(0, colon)));
  const std::string_view args = trim(t.substr(colon + 1));
  if (kind == "table" || kind == "user_table") return load_phi_table(std::string(args));
  const std::vector<double> p = parse_number_list(args);
  auto need = [&](std::size_t n) {
    if (p.size() != n) {
      fail(ErrorKind::configuration, "phi kind '" + kind + "' takes " + std::to_string(n) +
                                         " parameter(s): got " + std::to_string(p.size()));
    }
  };
  if (kind == "stable") {
    need(1);
    return PhiSpec::stable(p[0]);
  }
  if (kind == "mix" || kind == "mixture" || kind == "stable_mixture") {
    need(2);
    return PhiSpec::stable_mixture(p[0], p[1]);
  }
  if (kind == "stable_log") {
    need(2);
    return PhiSpec::stable_log(p[0], p[1]);
  }
  if (kind == "log_cosh") {
    need(1);
    return PhiSpec::log_cosh(p[0]);
  }
  fail(ErrorKind::configuration, "unknown phi kind '" + kind + "'");
}

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string_view origin) {
  KeyValueConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view t = line;
    if (const auto hash = t.find('#'); hash != std::string_view::npos) t = t.substr(0, hash);
    t = trim(t);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    const std::string where = std::string(origin) + ":" + std::to_string(lineno);
    if (eq == std::string_view::npos) fail(ErrorKind::configuration, where + ": expected key = value");
    const std::string key(trim(t.substr(0, eq)));
    std::string value(trim(t.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) fail(ErrorKind::configuration, where + ": empty key");
    if (cfg.has(key)) fail(ErrorKind::configuration, where + ": duplicate key '" + key + "'");
    cfg.set(key, value);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::configuration, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double KeyValueConfig::number_or(const std::string& key, double fallback) const {
  auto v = get(key);
  return v ? parse_number(*v, key) : fallback;
}

long KeyValueConfig::integer_or(const std::string& key, long fallback) const {
  auto v = get(key);
  return v ? parse_integer(*v, key) : fallback;
}

bool KeyValueConfig::flag_or(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  const std::string s = lower(*v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  fail(ErrorKind::configuration, key + ": expected a boolean: got '" + *v + "'");
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  if (!has(key)) order_.push_back(key);
  values_[key] = value;
}

void KeyValueConfig::require_known(const std::vector<std::string>& allowed) const {
  for (const auto& k : order_) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      fail(ErrorKind::configuration, "unknown config key '" + k + "'");
    }
  }
}

std::optional<PhiSpec> KeyValueConfig::phi() const {
  if (auto lit = get("phi")) return parse_phi(*lit);
  auto kind = get("phi.kind");
  if (!kind) return std::nullopt;
  std::string literal = *kind + ":";
  if (auto a = get("phi.alpha")) literal += *a;
  if (auto b = get("phi.beta")) literal += "," + *b;
  return parse_phi(literal);
}

}  // namespace subwalk
