// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ibbc/broadcast.hpp"
#include "ibbc/montecarlo.hpp"
#include "ibbc/pointwise.hpp"
#include "ibbc/single_layer.hpp"
#include "ibbc/sweep.hpp"

using namespace ibbc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Recorder {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && failures_ < 5) first_ += (first_.empty() ? "" : "; ") + what;
    failures_ += !ok;
    ++checks_;
  }
  Outcome outcome(const std::string& summary) const {
    std::ostringstream os;
    os << summary << " [" << checks_ - failures_ << "/" << checks_ << " checks]";
    if (failures_) os << " first failures: " << first_;
    return {failures_ == 0, os.str()};
  }

 private:
  int checks_ = 0;
  int failures_ = 0;
  std::string first_;
};

std::string num(double v) { return format_number(v); }

double db(double x) { return std::pow(10.0, x / 10.0); }

// 1. Closed-form Rayleigh layering.
Outcome closed_form() {
  Recorder r;
  const double u0 = (std::sqrt(41.0) - 1.0) / 20.0;
  const auto sol = solve_unconstrained(rayleigh(), 10.0);
  const double total = std::log(1.0 / u0) + 0.5 * (u0 - 1.0);
  r.require(std::abs(sol.u0 - u0) <= 1e-8, "u0=" + num(sol.u0));
  r.require(std::abs(sol.u1 - 1.0) <= 1e-8, "u1=" + num(sol.u1));
  r.require(std::abs(sol.total_rate - total) <= 1e-8, "total=" + num(sol.total_rate));
  return r.outcome("u0=" + num(sol.u0) + " u1=" + num(sol.u1) + " total=" + num(sol.total_rate));
}

// 2. Boundary residuals and the rate-constraint identity.
Outcome constrained_residuals() {
  Recorder r;
  const auto g = rayleigh();
  int binding = 0;
  for (double p : {1.0, 10.0, 100.0}) {
    const double free_total = solve_unconstrained(g, p).total_rate;
    for (double c : {0.25, 0.5, 1.0, 2.0}) {
      const std::string at = "P=" + num(p) + ",C=" + num(c);
      const auto sol = solve_df_constrained(g, {p, c});
      r.require(std::abs(sol.stationary_power(sol.u0) - p) / p <= 1e-8, at + " I(u0)");
      r.require(std::abs(sol.stationary_power(sol.u1)) <= 1e-8 * p, at + " I(u1)");
      if (c < free_total) {
        ++binding;
        const double lhs = sol.u1 * sol.u1 * g->pdf(sol.u1);
        const double rhs = std::exp(2.0 * c) * sol.u0 * sol.u0 * g->pdf(sol.u0);
        r.require(std::abs(lhs - rhs) / lhs <= 1e-6, at + " boundary identity");
        r.require(std::abs(sol.total_rate - c) <= 1e-6, at + " total=" + num(sol.total_rate));
        r.require(sol.lambda > 0.0, at + " lambda=" + num(sol.lambda));
      } else {
        // Slack constraint: the layering is the unconstrained one.
        r.require(sol.lambda == 0.0 && sol.total_rate <= c, at + " slack");
      }
    }
  }
  const auto slack = solve_df_constrained(g, {10.0, 10.0});
  const auto free = solve_unconstrained(g, 10.0);
  r.require(slack.lambda == 0.0 && slack.u0 == free.u0 && slack.u1 == free.u1, "C=10 not unconstrained");
  return r.outcome(std::to_string(binding) + " binding points of 12, C=10 slack");
}

// Broadcast solutions of the grid used by criteria 3 and 4.
struct GridPoint {
  double p;
  double c;
  BroadcastSolution obl;
  BroadcastSolution df;
};

const std::vector<GridPoint>& broadcast_grid() {
  static const std::vector<GridPoint> grid = [] {
    std::vector<GridPoint> out;
    const auto g = rayleigh();
    for (int d = 0; d <= 30; d += 5) {
      for (double c : {1.0, 2.0, 3.0, 4.0}) {
        const double p = db(d);
        out.push_back({p, c, solve_unconstrained_ironed(equivalent_distribution(g, {p, c}), p),
                       solve_df_constrained(g, {p, c})});
      }
    }
    return out;
  }();
  return grid;
}

// 3. The two average-rate integral forms.
Outcome integral_consistency() {
  Recorder r;
  double worst = 0.0;
  const auto check = [&](const BroadcastSolution& sol, const std::string& at) {
    const double d = std::abs(average_rate(sol, *sol.gain) - average_rate_by_parts(sol, *sol.gain));
    worst = std::max(worst, d);
    r.require(d <= 1e-6, at + " diff=" + num(d));
  };
  for (const auto& pt : broadcast_grid()) {
    const std::string at = "P=" + num(pt.p) + ",C=" + num(pt.c);
    check(pt.obl, at + " obliv");
    check(pt.df, at + " df");
  }
  const CapacityDistribution caps({{2.0, 1.0 / 3.0}, {5.0, 2.0 / 3.0}});
  for (int d = 0; d <= 30; d += 5) {
    const double p = db(d);
    check(solve_unconstrained_ironed(mixture_distribution(rayleigh(), p, caps), p), "mixture P=" + num(p));
  }
  for (double p : {1.0, 10.0, 100.0}) {
    for (double c : {0.25, 0.5}) check(solve_df_constrained(rayleigh(), {p, c}), "df P=" + num(p) + ",C=" + num(c));
  }
  return r.outcome("max |difference| " + num(worst));
}

// 4. Ordering of the six fixed-capacity schemes.
Outcome ordering() {
  Recorder r;
  const auto g = rayleigh();
  constexpr double eps = 1e-9;
  for (const auto& pt : broadcast_grid()) {
    const ChannelConfig cfg{pt.p, pt.c};
    const std::string at = "P=" + num(pt.p) + ",C=" + num(pt.c);
    const double o1 = oblivious_single_layer(cfg, *g).average_rate;
    const double ob = pt.obl.average_rate;
    const double oe = ergodic_oblivious(cfg, *g);
    const double d1 = df_single_layer(cfg, *g).average_rate;
    const double dbs = pt.df.average_rate;
    const double de = ergodic_df(cfg, *g);
    r.require(o1 <= ob + eps && ob <= oe + eps, at + " oblivious chain");
    r.require(d1 <= dbs + eps && dbs <= de + eps, at + " df chain");
    r.require(o1 <= d1 + eps && ob <= dbs + eps && oe <= de + eps, at + " oblivious <= df");
    for (double v : {o1, ob, oe, d1, dbs, de}) r.require(v <= pt.c, at + " rate above C");
  }
  return r.outcome(std::to_string(broadcast_grid().size()) + " grid points");
}

// 5. Single layer against the ergodic bound at 30 dB.
Outcome single_vs_ergodic() {
  Recorder r;
  const auto g = rayleigh();
  const auto ratio = [&](double c) {
    const ChannelConfig cfg{1000.0, c};
    const double erg = ergodic_oblivious(cfg, *g);
    return (erg - oblivious_single_layer(cfg, *g).average_rate) / erg;
  };
  const double small = ratio(0.5);
  const double large = ratio(4.0);
  r.require(small < 0.05, "C=0.5 ratio " + num(small));
  r.require(large > 0.15, "C=4 ratio " + num(large));
  return r.outcome("gap ratio C=0.5: " + num(small) + ", C=4: " + num(large));
}

// 6. A single-atom capacity law reproduces the fixed-capacity quantities.
Outcome degeneracy() {
  Recorder r;
  const auto g = rayleigh();
  double worst = 0.0;
  for (int d = 0; d <= 30; d += 10) {
    for (double c : {0.5, 2.0, 4.0}) {
      const double p = db(d);
      const ChannelConfig cfg{p, c};
      const auto caps = CapacityDistribution::fixed(c);
      const std::string at = "P=" + num(p) + ",C=" + num(c);
      const auto diff = [&](double a, double b, const std::string& what) {
        const double e = std::abs(a - b);
        worst = std::max(worst, e);
        r.require(e <= 1e-9, at + " " + what + " diff=" + num(e));
      };
      diff(uncertain_single_layer(p, caps, *g).average_rate, oblivious_single_layer(cfg, *g).average_rate, "1l");
      diff(solve_unconstrained_ironed(mixture_distribution(g, p, caps), p).average_rate,
           solve_unconstrained_ironed(equivalent_distribution(g, cfg), p).average_rate, "bs");
      diff(ergodic_oblivious_uncertain(p, caps, *g), ergodic_oblivious(cfg, *g), "erg");
      const auto mix = mixture_distribution(g, p, caps);
      const auto eq = equivalent_distribution(g, cfg);
      for (int k = 1; k < 50; ++k) {
        const double u = eq->support_upper() * k / 50.0;
        diff(mix->cdf(u), eq->cdf(u), "cdf");
      }
    }
  }
  return r.outcome("max |difference| " + num(worst));
}

// 7. The random-bottleneck penalty grows with SNR.
Outcome uncertainty_penalty() {
  Recorder r;
  const CapacityDistribution caps({{2.0, 1.0 / 3.0}, {5.0, 2.0 / 3.0}});
  const auto gap = [&](double p) {
    const double fixed = solve_unconstrained_ironed(equivalent_distribution(rayleigh(), {p, 4.0}), p).average_rate;
    const double random = solve_unconstrained_ironed(mixture_distribution(rayleigh(), p, caps), p).average_rate;
    return fixed - random;
  };
  const double g0 = gap(1.0);
  const double g30 = gap(1000.0);
  r.require(g30 > g0, "gap(30 dB)=" + num(g30) + " gap(0 dB)=" + num(g0));
  return r.outcome("gap at 0 dB " + num(g0) + ", at 30 dB " + num(g30));
}

// 8. Monte Carlo oracle for every scheme.
Outcome monte_carlo() {
  Recorder r;
  const auto g = rayleigh();
  constexpr std::uint64_t kDraws = 1'000'000;
  constexpr std::uint64_t kSeed = 20240611;
  constexpr std::uint64_t kSecondSeed = 977;
  int rows = 0, reruns = 0;
  double worst = 0.0;
  for (double snr : {0.0, 15.0, 30.0}) {
    for (const char* cap : {"0.5", "2", "2:0.3333333333;5:0.6666666667"}) {
      const auto caps = parse_capacity_spec(cap);
      for (Scheme s : kAllSchemes) {
        ++rows;
        const std::string at = std::string(scheme_tag(s)) + " snr=" + num(snr) + " C=" + cap;
        const auto point = evaluate_point(s, snr, caps, cap, g);
        if (!point.row.rate_nats) {
          r.require(false, at + " " + point.row.status);
          continue;
        }
        const double analytic = *point.row.rate_nats;
        SimulationSpec spec{s, point.row.p_linear, caps, kDraws, kSeed};
        auto res = simulate(spec, g, point.solution, 0);
        double z = (analytic - res.mean) / res.std_error;
        if (!(std::abs(z) <= 3.0)) {
          ++reruns;
          spec.seed = kSecondSeed;
          res = simulate(spec, g, point.solution, 0);
          z = (analytic - res.mean) / res.std_error;
        }
        worst = std::max(worst, std::abs(z));
        r.require(std::abs(z) <= 3.0, at + " z=" + num(z));
      }
    }
  }
  return r.outcome(std::to_string(rows) + " rows, " + std::to_string(reruns) + " second-seed reruns, max |z| " +
                   num(worst));
}

// 9. Byte-identical sweep output.
Outcome csv_determinism() {
  Recorder r;
  SweepSpec spec;
  spec.snr_db = parse_snr_list("0:30:2.5");
  spec.capacity_spec = "2:0.3333333333;5:0.6666666667";
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = (dir / "ibbc_acceptance_a.csv").string();
  const auto b = (dir / "ibbc_acceptance_b.csv").string();
  emit_csv(run_sweep(spec, 1), a);
  emit_csv(run_sweep(spec, 0), b);
  const auto slurp = [](const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const auto ta = slurp(a), tb = slurp(b);
  r.require(!ta.empty() && ta == tb, "files differ");
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  return r.outcome(std::to_string(ta.size()) + " bytes identical");
}

// 10. Finite-difference checks of densities and rate allocations.
Outcome finite_differences() {
  Recorder r;
  const auto g = rayleigh();
  double worst = 0.0;
  const auto pdf_check = [&](const GainDistribution& law, double hi, const std::vector<double>& avoid,
                             const std::string& at) {
    for (int k = 1; k < 400; ++k) {
      const double u = hi * k / 400.0;
      bool skip = false;
      for (double a : avoid) skip = skip || std::abs(u - a) < 1e-3 * a;
      if (skip) continue;
      const double h = 1e-6 * std::max(u, 1e-3);
      const double fd = (law.cdf(u + h) - law.cdf(u - h)) / (2.0 * h);
      const double e = std::abs(fd - law.pdf(u)) / std::max(1.0, law.pdf(u));
      worst = std::max(worst, e);
      r.require(e <= 1e-5, at + " pdf u=" + num(u));
    }
  };
  const auto rate_check = [&](const BroadcastSolution& sol, const std::string& at) {
    for (int k = 1; k < 100; ++k) {
      const double s = sol.u0 + (sol.u1 - sol.u0) * k / 100.0;
      bool skip = false;
      for (const auto& iv : sol.ironed) skip = skip || (s > iv.lo * (1 - 1e-3) && s < iv.hi * (1 + 1e-3));
      if (skip) continue;
      const double h = 1e-6 * s;
      const double fd = (sol.rate_allocation(s + h) - sol.rate_allocation(s - h)) / (2.0 * h);
      const double expect = 0.5 * sol.power_density(s) * s / (1.0 + sol.residual_power(s) * s);
      const double e = std::abs(fd - expect) / std::max(1.0, expect);
      worst = std::max(worst, e);
      r.require(e <= 1e-5, at + " R' s=" + num(s));
    }
  };
  const CapacityDistribution caps({{2.0, 1.0 / 3.0}, {5.0, 2.0 / 3.0}});
  for (double p : {1.0, 10.0, 100.0, 1000.0}) {
    for (double c : {0.5, 2.0, 4.0}) {
      const auto eq = equivalent_distribution(g, {p, c});
      pdf_check(*eq, eq->support_upper(), {}, "equivalent P=" + num(p) + ",C=" + num(c));
      rate_check(solve_unconstrained_ironed(eq, p), "equivalent P=" + num(p) + ",C=" + num(c));
    }
    const auto mix = mixture_distribution(g, p, caps);
    const double end_small = (std::exp(4.0) - 1.0) / p;
    pdf_check(*mix, 2.0 * end_small, {end_small}, "mixture P=" + num(p));
    rate_check(solve_unconstrained_ironed(mix, p), "mixture P=" + num(p));
  }
  return r.outcome("max relative error " + num(worst));
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "closed-form Rayleigh layering", 1.0, closed_form},
      {2, "rate-constrained boundary residuals", 5.0, constrained_residuals},
      {3, "average-rate integral consistency", 0.0, integral_consistency},
      {4, "scheme ordering over the SNR x C grid", 60.0, ordering},
      {5, "single layer vs ergodic bound at 30 dB", 0.0, single_vs_ergodic},
      {6, "single-atom uncertainty degeneracy", 0.0, degeneracy},
      {7, "random-bottleneck penalty grows with SNR", 0.0, uncertainty_penalty},
      {8, "Monte Carlo oracle, nine schemes", 300.0, monte_carlo},
      {9, "byte-identical CSV sweeps", 0.0, csv_determinism},
      {10, "finite-difference density and rate checks", 0.0, finite_differences},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      out.pass = false;
      out.detail += " (over the " + num(c.budget_s) + " s budget)";
    }
    failed += !out.pass;
    std::printf("criterion %2d %s: %s; %s (%.2f s)\n", c.id, out.pass ? "PASS" : "FAIL", c.title,
                out.detail.c_str(), secs);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
