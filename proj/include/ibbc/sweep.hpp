#pragma once

// (SNR, scheme) sweeps, the CSV table format and the Monte Carlo cross-check.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ibbc/fading.hpp"
#include "ibbc/montecarlo.hpp"
#include "ibbc/scheme.hpp"

namespace ibbc {

/// "a:b:step" (inclusive of b up to rounding) or a comma list "0,10,20".
std::vector<double> parse_snr_list(std::string_view text);

/// "4" for a fixed capacity, or atoms "C:p;C:p" in nats.
CapacityDistribution parse_capacity_spec(std::string_view text);

/// "all" or a comma list of scheme tags; returned in canonical order.
std::vector<Scheme> parse_scheme_list(std::string_view text);

/// "rayleigh", "deterministic" (unit gain) or "deterministic:<g>".
GainPtr parse_fading(std::string_view text);

struct SweepSpec {
  std::vector<double> snr_db;
  std::string capacity_spec = "4";
  std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  std::string fading = "rayleigh";
  std::string output;

  /// Throws std::invalid_argument on an empty or non-increasing SNR list, an
  /// empty scheme list or a bad capacity/fading string.
  void validate() const;
};

struct RateRow {
  double snr_db = 0.0;
  double p_linear = 0.0;
  Scheme scheme = Scheme::ObliviousSingle;
  std::string capacity_spec;
  std::optional<double> rate_nats;
  std::optional<double> s_th;
  std::optional<double> u0;
  std::optional<double> u1;
  std::optional<double> lambda;
  /// ok, fallback, ironed or error:<message>.
  std::string status = "ok";
};

/// A row together with the solution the Monte Carlo check replays.
struct EvaluatedPoint {
  RateRow row;
  SchemeSolution solution;
};

/// Fixed-C schemes run at the average of `caps`; solver failures become an
/// error status instead of an exception.
EvaluatedPoint evaluate_point(Scheme scheme, double snr_db, const CapacityDistribution& caps,
                              std::string_view capacity_text, const GainPtr& fading);

/// One row per (snr, scheme), snr outer and schemes in canonical order.
/// workers = 0 picks the hardware concurrency.
std::vector<RateRow> run_sweep(const SweepSpec& spec, unsigned workers = 0);

inline constexpr std::string_view kCsvHeader = "snr_db,p_linear,scheme,capacity_spec,rate_nats,s_th,u0,u1,lambda,status";

/// Shortest general-format rendering at 12 significant digits.
std::string format_number(double v);

std::string to_csv(const std::vector<RateRow>& rows);
/// Throws std::runtime_error naming the path on I/O failure.
void emit_csv(const std::vector<RateRow>& rows, const std::string& path);
std::vector<RateRow> parse_csv(std::string_view text);
std::vector<RateRow> read_csv(const std::string& path);

struct McCheckRow {
  RateRow row;
  double analytic = 0.0;
  double mc_mean = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  std::string error;  // nonempty when the row could not be checked
};

struct McCheckReport {
  std::vector<McCheckRow> rows;
  double max_abs_z = 0.0;
  bool passed(double z_limit = 4.0) const;
};

/// Throws std::invalid_argument when n_samples = 0.
McCheckReport mc_check(const SweepSpec& spec, std::uint64_t n_samples, std::uint64_t seed, unsigned workers = 0);

}  // namespace ibbc
