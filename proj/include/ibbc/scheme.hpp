#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace ibbc {

/// The nine relaying/coding combinations, in canonical (output) order.
enum class Scheme {
  ObliviousSingle,
  ObliviousBroadcast,
  ObliviousErgodic,
  DfSingle,
  DfBroadcast,
  DfErgodic,
  UncertainSingle,
  UncertainBroadcast,
  UncertainErgodic,
};

inline constexpr std::array<Scheme, 9> kAllSchemes{
    Scheme::ObliviousSingle,  Scheme::ObliviousBroadcast, Scheme::ObliviousErgodic,
    Scheme::DfSingle,         Scheme::DfBroadcast,        Scheme::DfErgodic,
    Scheme::UncertainSingle,  Scheme::UncertainBroadcast, Scheme::UncertainErgodic,
};

constexpr std::string_view scheme_tag(Scheme s) {
  switch (s) {
    case Scheme::ObliviousSingle: return "obliv-1l";
    case Scheme::ObliviousBroadcast: return "obliv-bs";
    case Scheme::ObliviousErgodic: return "obliv-erg";
    case Scheme::DfSingle: return "df-1l";
    case Scheme::DfBroadcast: return "df-bs";
    case Scheme::DfErgodic: return "df-erg";
    case Scheme::UncertainSingle: return "uc-obliv-1l";
    case Scheme::UncertainBroadcast: return "uc-obliv-bs";
    case Scheme::UncertainErgodic: return "uc-obliv-erg";
  }
  return "?";
}

constexpr std::optional<Scheme> parse_scheme(std::string_view tag) {
  for (Scheme s : kAllSchemes) {
    if (scheme_tag(s) == tag) return s;
  }
  return std::nullopt;
}

constexpr bool uses_random_capacity(Scheme s) {
  return s == Scheme::UncertainSingle || s == Scheme::UncertainBroadcast || s == Scheme::UncertainErgodic;
}

constexpr bool is_single_layer(Scheme s) {
  return s == Scheme::ObliviousSingle || s == Scheme::DfSingle || s == Scheme::UncertainSingle;
}

constexpr bool is_broadcast(Scheme s) {
  return s == Scheme::ObliviousBroadcast || s == Scheme::DfBroadcast || s == Scheme::UncertainBroadcast;
}

}  // namespace ibbc
