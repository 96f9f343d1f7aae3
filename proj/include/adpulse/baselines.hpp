#pragma once

#include "adpulse/model.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace adpulse {

enum class Strategy { Uniform, Corner, Random, NearOptimal };

/// A comparison strategy. Random carries its seed; the others ignore it.
struct StrategyKind {
    Strategy strategy = Strategy::Uniform;
    std::optional<std::uint64_t> seed;

    static StrategyKind uniform() { return {Strategy::Uniform, std::nullopt}; }
    static StrategyKind corner() { return {Strategy::Corner, std::nullopt}; }
    static StrategyKind random(std::uint64_t seed) { return {Strategy::Random, seed}; }
    static StrategyKind near_optimal() { return {Strategy::NearOptimal, std::nullopt}; }
};

/// CLI names: "uniform", "corner", "random", "optimal".
std::string_view to_string(Strategy strategy) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

/// Uniform:  t_i = i T / n.
/// Corner:   first ceil(m/2) ads at 0, the rest at T.
/// Random:   t_0 = 0, t_n = T, interior times i.i.d. uniform on (0, T), sorted.
///           Draws come from std::mt19937_64 (a fully specified engine) as
///           (x >> 11) * 2^-53, rejecting 0, so the sequence is stable across
///           standard libraries.
/// NearOptimal: the closed-form solver.
Schedule make_schedule(const StrategyKind& kind, const ProblemSpec& spec);

} // namespace adpulse
