#pragma once

// Seeded Monte Carlo oracle for every average-rate expression.
//
// Draws are split into fixed chunks of kChunkSize. Chunk c runs its own
// std::mt19937_64 seeded with std::seed_seq{seed_lo32, seed_hi32, c}, and
// chunk statistics are merged in chunk order, so the result depends only on
// (spec, seed), never on how many workers shared the chunks.

#include <cstdint>
#include <random>
#include <variant>

#include "ibbc/broadcast.hpp"
#include "ibbc/fading.hpp"
#include "ibbc/scheme.hpp"
#include "ibbc/single_layer.hpp"

namespace ibbc {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t kChunkSize = 65536;

/// Uniform variate in [0, 1) from the top 53 bits of one engine output.
inline double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

struct SimulationSpec {
  Scheme scheme = Scheme::ObliviousErgodic;
  double power = 1.0;
  /// Fixed-C schemes run at caps.average(); uncertain schemes draw C_b per block.
  CapacityDistribution caps = CapacityDistribution::fixed(0.0);
  std::uint64_t n_samples = 1;
  std::uint64_t seed = 0;
};

struct SimulationResult {
  double mean = 0.0;
  /// Sample standard deviation (unbiased) over sqrt(n); 0 when n = 1.
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
};

struct BlockDraw {
  double gain;
  double capacity;
};

/// One block: fading gain by inverse CDF, then C_b from the atoms when the
/// capacity is random (independent of the fading draw).
class BlockSampler {
 public:
  BlockSampler(GainPtr fading, CapacityDistribution caps, bool random_capacity);
  BlockDraw operator()(Engine& eng) const;

 private:
  GainPtr fading_;
  CapacityDistribution caps_;
  bool random_capacity_;
};

/// Precomputed solution for the simulated scheme: SingleLayerSolution for the
/// 1l schemes, BroadcastSolution for bs schemes (or a SingleLayerSolution
/// for a df-bs fallback and zero-capacity points), monostate for ergodic ones.
using SchemeSolution = std::variant<std::monostate, SingleLayerSolution, BroadcastSolution>;

/// Per-block achieved rate under `scheme`.
double block_rate(Scheme scheme, double power, double fixed_capacity, const BlockDraw& draw,
                  const SchemeSolution& solution);

/// Throws std::invalid_argument on a scheme/solution mismatch or n_samples = 0.
/// workers = 0 picks the hardware concurrency.
SimulationResult simulate(const SimulationSpec& spec, GainPtr fading, const SchemeSolution& solution,
                          unsigned workers = 1);

}  // namespace ibbc
