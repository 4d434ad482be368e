// ibbc: rate sweeps, single-point diagnostics and Monte Carlo cross-checks for
// the block-fading information-bottleneck channel.
//
//   ibbc sweep --snr-db 0:30:1 --capacity 4 --schemes all --out fig5.csv
//   ibbc mc-check --samples 1000000 --seed 42 --snr-db 0,10,20 --capacity 2
//   ibbc point --snr-db 10 --capacity 2 --scheme df-bs
//
// Options may also come from a flat key=value file given with --config.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ibbc/broadcast.hpp"
#include "ibbc/sweep.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kArgError = 1;
constexpr int kSolverError = 2;
constexpr int kZFailure = 3;

struct Options {
  std::string snr = "0:30:1";
  std::string capacity = "4";
  std::string schemes = "all";
  std::string scheme;
  std::string fading = "rayleigh";
  std::string out;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  double z_limit = 4.0;
};

ibbc::SweepSpec make_spec(const Options& o) {
  ibbc::SweepSpec spec;
  spec.snr_db = ibbc::parse_snr_list(o.snr);
  spec.capacity_spec = o.capacity;
  spec.schemes = ibbc::parse_scheme_list(o.schemes);
  spec.fading = o.fading;
  spec.output = o.out;
  spec.validate();
  return spec;
}

int run_sweep(const Options& o) {
  const auto spec = make_spec(o);
  const auto rows = ibbc::run_sweep(spec, o.threads);
  if (spec.output.empty()) {
    std::cout << ibbc::to_csv(rows);
  } else {
    ibbc::emit_csv(rows, spec.output);
  }
  return kOk;
}

int run_mc_check(const Options& o) {
  const auto spec = make_spec(o);
  const auto report = ibbc::mc_check(spec, o.samples, o.seed, o.threads);
  std::cout << "snr_db,scheme,capacity_spec,analytic,mc_mean,std_error,z,status\n";
  bool errors = false;
  for (const auto& r : report.rows) {
    std::cout << ibbc::format_number(r.row.snr_db) << ',' << ibbc::scheme_tag(r.row.scheme) << ','
              << r.row.capacity_spec << ',';
    if (!r.error.empty()) {
      errors = true;
      std::cout << ",,,," << r.error << '\n';
      continue;
    }
    std::cout << ibbc::format_number(r.analytic) << ',' << ibbc::format_number(r.mc_mean) << ','
              << ibbc::format_number(r.std_error) << ',' << ibbc::format_number(r.z) << ','
              << (std::abs(r.z) <= o.z_limit ? "pass" : "FAIL") << '\n';
  }
  std::cerr << "max |z| = " << ibbc::format_number(report.max_abs_z) << " over " << report.rows.size()
            << " rows\n";
  if (report.max_abs_z > o.z_limit) return kZFailure;
  return errors ? kSolverError : kOk;
}

void print_broadcast(const ibbc::BroadcastSolution& bs) {
  using ibbc::format_number;
  std::cout << "law            " << bs.gain->name() << '\n'
            << "power          " << format_number(bs.power) << '\n'
            << "u0             " << format_number(bs.u0) << '\n'
            << "u1             " << format_number(bs.u1) << '\n'
            << "lambda         " << format_number(bs.lambda) << '\n'
            << "total_rate     " << format_number(bs.total_rate) << '\n'
            << "average_rate   " << format_number(bs.average_rate) << '\n';
  for (const auto& iv : bs.ironed) {
    std::cout << "ironed         [" << format_number(iv.lo) << ", " << format_number(iv.hi)
              << "] level " << format_number(iv.level) << '\n';
  }
  std::cout << "u,I(u),rho(u),R(u)\n";
  constexpr int kRows = 16;
  for (int k = 0; k <= kRows; ++k) {
    const double u = bs.u0 + (bs.u1 - bs.u0) * k / kRows;
    std::cout << format_number(u) << ',' << format_number(bs.residual_power(u)) << ','
              << format_number(bs.power_density(u)) << ',' << format_number(bs.rate_allocation(u)) << '\n';
  }
}

int run_point(const Options& o) {
  const auto snr = ibbc::parse_snr_list(o.snr);
  if (snr.size() != 1) throw std::invalid_argument("point takes a single --snr-db value");
  const auto scheme = ibbc::parse_scheme(o.scheme);
  if (!scheme) throw std::invalid_argument("point needs --scheme <tag>, got '" + o.scheme + "'");
  const auto caps = ibbc::parse_capacity_spec(o.capacity);
  const auto fading = ibbc::parse_fading(o.fading);

  const auto point = ibbc::evaluate_point(*scheme, snr.front(), caps, o.capacity, fading);
  std::cout << ibbc::to_csv({point.row});
  if (const auto* bs = std::get_if<ibbc::BroadcastSolution>(&point.solution)) {
    print_broadcast(*bs);
  } else if (const auto* sl = std::get_if<ibbc::SingleLayerSolution>(&point.solution)) {
    using ibbc::format_number;
    std::cout << "s_th           " << format_number(sl->s_th) << '\n'
              << "allocated_rate " << format_number(sl->allocated_rate) << '\n'
              << "success_prob   " << format_number(sl->success_probability) << '\n'
              << "average_rate   " << format_number(sl->average_rate) << '\n';
  }
  if (point.row.status.rfind("error:", 0) == 0) {
    std::cerr << point.row.status << '\n';
    return kSolverError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Achievable rates for the block-fading information-bottleneck channel"};
  app.set_config("--config", "", "flat key=value option file");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--snr-db", o.snr, "SNR in dB: start:stop:step or a comma list");
  app.add_option("--capacity", o.capacity, "bottleneck capacity in nats, or atoms C:p;C:p");
  app.add_option("--schemes", o.schemes, "all, or a comma list of scheme tags");
  app.add_option("--scheme", o.scheme, "single scheme tag (point)");
  app.add_option("--fading", o.fading, "rayleigh | deterministic[:g]");
  app.add_option("--out", o.out, "CSV output path (default stdout)");
  app.add_option("--samples", o.samples, "Monte Carlo draws per row");
  app.add_option("--seed", o.seed, "Monte Carlo seed");
  app.add_option("--threads", o.threads, "worker threads (0 = all cores)");
  app.add_option("--z-limit", o.z_limit, "mc-check |z| threshold");

  auto* sweep = app.add_subcommand("sweep", "rate table over SNR x schemes");
  auto* mc = app.add_subcommand("mc-check", "compare analytic rates with Monte Carlo");
  auto* point = app.add_subcommand("point", "one (SNR, scheme) point with full diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kArgError;
  }

  try {
    if (mc->parsed() && o.samples == 0) throw std::invalid_argument("--samples must be >= 1");
    if (sweep->parsed()) return run_sweep(o);
    if (mc->parsed()) return run_mc_check(o);
    if (point->parsed()) return run_point(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << '\n';
    return kArgError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverError;
  }
  return kArgError;
}
