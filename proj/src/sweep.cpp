#include "ibbc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ibbc/broadcast.hpp"
#include "ibbc/pointwise.hpp"
#include "ibbc/single_layer.hpp"

namespace ibbc {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

double parse_double(std::string_view text, std::string_view what) {
  const auto t = trim(text);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + ": not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::string sanitize(std::string msg) {
  for (char& ch : msg) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ' ';
  }
  return msg;
}

double p_linear(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

SingleLayerSolution zero_rate() { return {}; }

RateRow base_row(Scheme scheme, double snr_db, std::string_view capacity_text) {
  RateRow row;
  row.snr_db = snr_db;
  row.p_linear = p_linear(snr_db);
  row.scheme = scheme;
  row.capacity_spec = std::string(capacity_text);
  return row;
}

void fill_single(RateRow& row, const SingleLayerSolution& sl) {
  row.rate_nats = sl.average_rate;
  row.s_th = sl.s_th;
}

void fill_broadcast(RateRow& row, const BroadcastSolution& bs) {
  row.rate_nats = bs.average_rate;
  row.u0 = bs.u0;
  row.u1 = bs.u1;
  row.lambda = bs.lambda;
  if (!bs.ironed.empty()) row.status = "ironed";
}

}  // namespace

std::vector<double> parse_snr_list(std::string_view text) {
  const auto t = trim(text);
  std::vector<double> out;
  if (t.find(':') != std::string_view::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw std::invalid_argument("snr range must be start:stop:step");
    const double a = parse_double(parts[0], "snr start");
    const double b = parse_double(parts[1], "snr stop");
    const double step = parse_double(parts[2], "snr step");
    if (!(step > 0.0)) throw std::invalid_argument("snr step must be positive");
    if (b < a) throw std::invalid_argument("snr stop must not be below start");
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) out.push_back(a + static_cast<double>(k) * step);
  } else {
    for (auto part : split(t, ',')) out.push_back(parse_double(part, "snr"));
  }
  if (out.empty()) throw std::invalid_argument("snr list is empty");
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (!(out[k] > out[k - 1])) throw std::invalid_argument("snr list must be strictly increasing");
  }
  return out;
}

CapacityDistribution parse_capacity_spec(std::string_view text) {
  const auto t = trim(text);
  if (t.empty()) throw std::invalid_argument("capacity spec is empty");
  if (t.find(':') == std::string_view::npos) {
    const double c = parse_double(t, "capacity");
    if (c < 0.0) throw std::invalid_argument("capacity must be non-negative");
    return CapacityDistribution::fixed(c);
  }
  std::vector<CapacityDistribution::Atom> atoms;
  for (auto item : split(t, ';')) {
    if (trim(item).empty()) continue;
    const auto kv = split(item, ':');
    if (kv.size() != 2) throw std::invalid_argument("capacity atom must be C:p, got '" + std::string(item) + "'");
    atoms.push_back({parse_double(kv[0], "capacity"), parse_double(kv[1], "probability")});
  }
  return CapacityDistribution(std::move(atoms));
}

std::vector<Scheme> parse_scheme_list(std::string_view text) {
  const auto t = trim(text);
  if (t == "all") return {kAllSchemes.begin(), kAllSchemes.end()};
  std::vector<bool> chosen(kAllSchemes.size(), false);
  for (auto tag : split(t, ',')) {
    const auto s = parse_scheme(trim(tag));
    if (!s) throw std::invalid_argument("unknown scheme '" + std::string(trim(tag)) + "'");
    chosen[static_cast<std::size_t>(*s)] = true;
  }
  std::vector<Scheme> out;
  for (Scheme s : kAllSchemes) {
    if (chosen[static_cast<std::size_t>(s)]) out.push_back(s);
  }
  return out;
}

GainPtr parse_fading(std::string_view text) {
  const auto t = trim(text);
  if (t == "rayleigh") return rayleigh();
  if (t == "deterministic") return std::make_shared<DeterministicGain>(1.0);
  if (t.rfind("deterministic:", 0) == 0) {
    const double g = parse_double(t.substr(14), "deterministic gain");
    if (!(g > 0.0)) throw std::invalid_argument("deterministic gain must be positive");
    return std::make_shared<DeterministicGain>(g);
  }
  throw std::invalid_argument("unknown fading '" + std::string(t) + "'");
}

void SweepSpec::validate() const {
  if (snr_db.empty()) throw std::invalid_argument("snr list is empty");
  for (std::size_t k = 1; k < snr_db.size(); ++k) {
    if (!(snr_db[k] > snr_db[k - 1])) throw std::invalid_argument("snr list must be strictly increasing");
  }
  for (double v : snr_db) {
    if (!std::isfinite(v)) throw std::invalid_argument("snr values must be finite");
  }
  if (schemes.empty()) throw std::invalid_argument("scheme list is empty");
  parse_capacity_spec(capacity_spec);
  parse_fading(fading);
}

EvaluatedPoint evaluate_point(Scheme scheme, double snr_db, const CapacityDistribution& caps,
                              std::string_view capacity_text, const GainPtr& fading) {
  EvaluatedPoint out{base_row(scheme, snr_db, capacity_text), std::monostate{}};
  RateRow& row = out.row;
  const double power = row.p_linear;
  const ChannelConfig cfg{power, caps.average()};
  try {
    switch (scheme) {
      case Scheme::ObliviousSingle: {
        const auto sl = oblivious_single_layer(cfg, *fading);
        fill_single(row, sl);
        out.solution = sl;
        break;
      }
      case Scheme::ObliviousBroadcast: {
        if (cfg.capacity == 0.0) {
          row.rate_nats = 0.0;
          out.solution = zero_rate();
          break;
        }
        const auto bs = solve_unconstrained_ironed(equivalent_distribution(fading, cfg), power);
        fill_broadcast(row, bs);
        out.solution = bs;
        break;
      }
      case Scheme::ObliviousErgodic:
        row.rate_nats = ergodic_oblivious(cfg, *fading);
        break;
      case Scheme::DfSingle: {
        const auto sl = df_single_layer(cfg, *fading);
        fill_single(row, sl);
        out.solution = sl;
        break;
      }
      case Scheme::DfBroadcast: {
        const auto res = solve_df_broadcast(fading, cfg);
        if (res.is_fallback()) {
          fill_single(row, res.fallback);
          row.status = "fallback";
          out.solution = res.fallback;
        } else {
          fill_broadcast(row, *res.broadcast);
          out.solution = *res.broadcast;
        }
        break;
      }
      case Scheme::DfErgodic:
        row.rate_nats = ergodic_df(cfg, *fading);
        break;
      case Scheme::UncertainSingle: {
        const auto sl = uncertain_single_layer(power, caps, *fading);
        fill_single(row, sl);
        out.solution = sl;
        break;
      }
      case Scheme::UncertainBroadcast: {
        if (caps.max_capacity() == 0.0) {
          row.rate_nats = 0.0;
          out.solution = zero_rate();
          break;
        }
        const auto bs = solve_unconstrained_ironed(mixture_distribution(fading, power, caps), power);
        fill_broadcast(row, bs);
        out.solution = bs;
        break;
      }
      case Scheme::UncertainErgodic:
        row.rate_nats = ergodic_oblivious_uncertain(power, caps, *fading);
        break;
    }
  } catch (const std::exception& e) {
    row = base_row(scheme, snr_db, capacity_text);
    row.status = "error:" + sanitize(e.what());
    out.solution = std::monostate{};
  }
  return out;
}

std::vector<RateRow> run_sweep(const SweepSpec& spec, unsigned workers) {
  spec.validate();
  const auto caps = parse_capacity_spec(spec.capacity_spec);
  const auto fading = parse_fading(spec.fading);
  const std::string capacity_text(trim(spec.capacity_spec));

  const std::size_t n_schemes = spec.schemes.size();
  const std::size_t total = spec.snr_db.size() * n_schemes;
  std::vector<RateRow> rows(total);
  const auto work = [&](std::size_t k) {
    rows[k] = evaluate_point(spec.schemes[k % n_schemes], spec.snr_db[k / n_schemes], caps, capacity_text, fading).row;
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
  if (workers <= 1) {
    for (std::size_t k = 0; k < total; ++k) work(k);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < total; k = next++) work(k);
      });
    }
  }
  return rows;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string to_csv(const std::vector<RateRow>& rows) {
  const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += format_number(r.snr_db) + ',' + format_number(r.p_linear) + ',' + std::string(scheme_tag(r.scheme)) +
           ',' + r.capacity_spec + ',' + opt(r.rate_nats) + ',' + opt(r.s_th) + ',' + opt(r.u0) + ',' + opt(r.u1) +
           ',' + opt(r.lambda) + ',' + r.status + '\n';
  }
  return out;
}

void emit_csv(const std::vector<RateRow>& rows, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  const auto text = to_csv(rows);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.close();
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<RateRow> parse_csv(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kCsvHeader) throw std::invalid_argument("csv: missing or unexpected header");
  const auto opt = [](std::string_view f) -> std::optional<double> {
    if (f.empty()) return std::nullopt;
    return parse_double(f, "csv field");
  };
  std::vector<RateRow> rows;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto f = split(lines[k], ',');
    if (f.size() != 10) throw std::invalid_argument("csv: line " + std::to_string(k + 1) + " has " +
                                                    std::to_string(f.size()) + " fields");
    const auto scheme = parse_scheme(f[2]);
    if (!scheme) throw std::invalid_argument("csv: unknown scheme on line " + std::to_string(k + 1));
    RateRow r;
    r.snr_db = parse_double(f[0], "snr_db");
    r.p_linear = parse_double(f[1], "p_linear");
    r.scheme = *scheme;
    r.capacity_spec = std::string(f[3]);
    r.rate_nats = opt(f[4]);
    r.s_th = opt(f[5]);
    r.u0 = opt(f[6]);
    r.u1 = opt(f[7]);
    r.lambda = opt(f[8]);
    r.status = std::string(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<RateRow> read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

bool McCheckReport::passed(double z_limit) const {
  return std::all_of(rows.begin(), rows.end(), [&](const McCheckRow& r) { return r.error.empty() && std::abs(r.z) <= z_limit; });
}

McCheckReport mc_check(const SweepSpec& spec, std::uint64_t n_samples, std::uint64_t seed, unsigned workers) {
  if (n_samples == 0) throw std::invalid_argument("mc-check: n_samples must be >= 1");
  spec.validate();
  const auto caps = parse_capacity_spec(spec.capacity_spec);
  const auto fading = parse_fading(spec.fading);
  const std::string capacity_text(trim(spec.capacity_spec));

  McCheckReport report;
  for (double snr : spec.snr_db) {
    for (Scheme scheme : spec.schemes) {
      auto point = evaluate_point(scheme, snr, caps, capacity_text, fading);
      McCheckRow out;
      out.row = point.row;
      if (!point.row.rate_nats) {
        out.error = point.row.status;
        report.rows.push_back(std::move(out));
        continue;
      }
      SimulationSpec sim{scheme, point.row.p_linear, caps, n_samples, seed};
      try {
        const auto res = simulate(sim, fading, point.solution, workers);
        out.analytic = *point.row.rate_nats;
        out.mc_mean = res.mean;
        out.std_error = res.std_error;
        const double diff = out.analytic - out.mc_mean;
        if (res.std_error > 0.0) {
          out.z = diff / res.std_error;
        } else {
          out.z = diff == 0.0 ? 0.0 : std::copysign(numerics::kInf, diff);
        }
        report.max_abs_z = std::max(report.max_abs_z, std::abs(out.z));
      } catch (const std::exception& e) {
        out.error = "error:" + sanitize(e.what());
      }
      report.rows.push_back(std::move(out));
    }
  }
  return report;
}

}  // namespace ibbc
