#include "ibbc/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ibbc/pointwise.hpp"

namespace ibbc {

BlockSampler::BlockSampler(GainPtr fading, CapacityDistribution caps, bool random_capacity)
    : fading_(std::move(fading)), caps_(std::move(caps)), random_capacity_(random_capacity) {}

BlockDraw BlockSampler::operator()(Engine& eng) const {
  const double s = fading_->quantile(uniform01(eng));
  if (!random_capacity_) return {s, caps_.average()};
  return {s, caps_.atoms()[caps_.pick(uniform01(eng))].capacity};
}

namespace {

void check_solution(Scheme scheme, const SchemeSolution& solution) {
  bool ok;
  if (is_single_layer(scheme)) {
    ok = std::holds_alternative<SingleLayerSolution>(solution);
  } else if (is_broadcast(scheme)) {
    ok = !std::holds_alternative<std::monostate>(solution);
  } else {
    ok = std::holds_alternative<std::monostate>(solution);
  }
  if (!ok) {
    throw std::invalid_argument("simulate: solution does not match scheme " + std::string(scheme_tag(scheme)));
  }
}

double single_layer_rate(const SingleLayerSolution& sl, double threshold_gain) {
  return threshold_gain >= sl.s_th ? sl.allocated_rate : 0.0;
}

// A broadcast scheme may carry a single-layer solution (DF fallback, or a
// degenerate zero-capacity point).
double broadcast_rate(const SchemeSolution& solution, double gain) {
  if (const auto* sl = std::get_if<SingleLayerSolution>(&solution)) return single_layer_rate(*sl, gain);
  return std::get<BroadcastSolution>(solution).rate_allocation(gain);
}

struct Moments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    const double total = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
};

}  // namespace

double block_rate(Scheme scheme, double power, double fixed_capacity, const BlockDraw& draw,
                  const SchemeSolution& solution) {
  const ChannelConfig fixed{power, fixed_capacity};
  const ChannelConfig drawn{power, draw.capacity};
  switch (scheme) {
    case Scheme::ObliviousSingle:
    case Scheme::DfSingle:
      return single_layer_rate(std::get<SingleLayerSolution>(solution), draw.gain);
    case Scheme::UncertainSingle:
      return single_layer_rate(std::get<SingleLayerSolution>(solution), fpr_eq(draw.gain, drawn));
    case Scheme::ObliviousBroadcast:
      return broadcast_rate(solution, fpr_eq(draw.gain, fixed));
    case Scheme::UncertainBroadcast:
      return broadcast_rate(solution, fpr_eq(draw.gain, drawn));
    case Scheme::DfBroadcast:
      return broadcast_rate(solution, draw.gain);
    case Scheme::ObliviousErgodic:
      return oblivious_capacity({fixed, draw.gain});
    case Scheme::DfErgodic:
      return df_capacity({fixed, draw.gain});
    case Scheme::UncertainErgodic:
      return oblivious_capacity({drawn, draw.gain});
  }
  return 0.0;
}

SimulationResult simulate(const SimulationSpec& spec, GainPtr fading, const SchemeSolution& solution,
                          unsigned workers) {
  if (spec.n_samples == 0) throw std::invalid_argument("simulate: n_samples must be >= 1");
  if (!fading) throw std::invalid_argument("simulate: null fading distribution");
  check_solution(spec.scheme, solution);

  const BlockSampler sampler(fading, spec.caps, uses_random_capacity(spec.scheme));
  const double fixed_capacity = spec.caps.average();
  const std::uint64_t chunks = (spec.n_samples + kChunkSize - 1) / kChunkSize;
  std::vector<Moments> partial(chunks);

  const auto run_chunk = [&](std::uint64_t c) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    Engine eng(seq);
    const std::uint64_t begin = c * kChunkSize;
    const std::uint64_t end = std::min(begin + kChunkSize, spec.n_samples);
    Moments m;
    for (std::uint64_t i = begin; i < end; ++i) {
      m.add(block_rate(spec.scheme, spec.power, fixed_capacity, sampler(eng), solution));
    }
    partial[c] = m;
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) run_chunk(c);
      });
    }
  }

  Moments total;
  for (const auto& m : partial) total.merge(m);
  SimulationResult out;
  out.n_samples = total.n;
  out.mean = total.mean;
  out.std_error = total.n > 1 ? std::sqrt(total.m2 / static_cast<double>(total.n - 1) / static_cast<double>(total.n)) : 0.0;
  return out;
}

}  // namespace ibbc
