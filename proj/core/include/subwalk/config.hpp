#pragma once

// Phi literals ("stable:0.5", "mix:0.3,0.7", ...) and flat key = value
// configuration files.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subwalk/bernstein.hpp"

namespace subwalk {

/// Grammar: kind ':' param (',' param)*. Kinds: stable, mix (alias
/// mixture, stable_mixture), stable_log, log_cosh, table (a CSV path with
/// lambda,phi rows).
PhiSpec parse_phi(std::string_view literal);

/// Parses "a,b,c" into numbers; throws a configuration error on junk.
std::vector<double> parse_number_list(std::string_view text);
double parse_number(std::string_view text, std::string_view what);
long parse_integer(std::string_view text, std::string_view what);

/// Lines "key = value"; '#' starts a comment; blank lines ignored. Keys are
/// unique. Order of first appearance is kept for echoing.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text, std::string_view origin = "<config>");
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double number_or(const std::string& key, double fallback) const;
  long integer_or(const std::string& key, long fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;

  void set(const std::string& key, const std::string& value);
  const std::vector<std::string>& keys() const noexcept { return order_; }
  /// Throws a configuration error naming the first key outside `allowed`.
  void require_known(const std::vector<std::string>& allowed) const;

  /// Phi from "phi = <literal>" or from phi.kind / phi.alpha / phi.beta.
  std::optional<PhiSpec> phi() const;

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
};

/// Reads lambda,phi rows (optional header) into a user_table spec.
PhiSpec load_phi_table(const std::string& path);

}  // namespace subwalk
