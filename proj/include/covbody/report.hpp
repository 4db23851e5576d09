#ifndef COVBODY_REPORT_HPP
#define COVBODY_REPORT_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace covbody {

/// Outcome of an inequality or identity check.
struct VerifyReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
  /// Signed distance to failure; nonnegative when the check passes.
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  long samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> notes;
  /// Additional named scalars, in insertion order.
  std::vector<std::pair<std::string, double>> extras;
  /// Per-direction table.
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void extra(std::string key, double value) { extras.emplace_back(std::move(key), value); }
  double get(const std::string& key) const {
    for (const auto& [k, v] : extras)
      if (k == key) return v;
    return 0.0;
  }
};

}  // namespace covbody

#endif  // COVBODY_REPORT_HPP
