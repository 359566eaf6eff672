#pragma once

/// \file
/// The verification suite run by `chl verify`: named checks, each producing
/// a JSON record {check, params, value, target, tolerance, pass}.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chl/verify.hpp"

namespace chl {

struct SuiteConfig {
  double radius_n = 16.0;
  double lambda = 1.0;
  std::uint64_t seed = 1;
  std::size_t replicas = 2000;
  double quad_tol = 1e-10;
  unsigned threads = 0;
  std::vector<std::string> only;  // empty: every check
};

struct CheckOutcome {
  std::string check;
  nlohmann::json params;
  nlohmann::json value;
  nlohmann::json target;
  double tolerance = 0.0;
  bool pass = false;
  std::optional<RateFit> fit;  // raw grid, written as CSV next to the report
};

/// Names accepted by SuiteConfig::only, in execution order.
const std::vector<std::string>& check_names();

/// Throws std::invalid_argument for an unknown name in `only`.
std::vector<CheckOutcome> run_checks(const SuiteConfig& config);

nlohmann::json report_json(const std::vector<CheckOutcome>& outcomes);

nlohmann::json fit_json(const RateFit& fit);

/// CSV with columns scale,error.
void write_rate_csv(std::ostream& out, const RateFit& fit);

}  // namespace chl
