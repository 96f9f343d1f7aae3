#include "adpulse/baselines.hpp"

#include "adpulse/error.hpp"
#include "adpulse/solver.hpp"

#include <algorithm>
#include <random>

namespace adpulse {

std::string_view to_string(Strategy strategy) noexcept {
    switch (strategy) {
        case Strategy::Uniform:     return "uniform";
        case Strategy::Corner:      return "corner";
        case Strategy::Random:      return "random";
        case Strategy::NearOptimal: return "optimal";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
    for (Strategy s : {Strategy::Uniform, Strategy::Corner, Strategy::Random, Strategy::NearOptimal})
        if (to_string(s) == name) return s;
    return std::nullopt;
}

namespace {

Schedule corner_schedule(const ProblemSpec& spec) {
    const int m = spec.m_ads;
    const int at_start = (m + 1) / 2;
    Schedule sched;
    sched.times.assign(static_cast<std::size_t>(m), spec.horizon);
    std::fill_n(sched.times.begin(), at_start, 0.0);
    return sched;
}

Schedule random_schedule(const ProblemSpec& spec, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    auto draw_open_interval = [&] {
        while (true) {
            const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
            const double t = u * spec.horizon;
            if (t > 0.0 && t < spec.horizon) return t;
        }
    };

    Schedule sched;
    sched.times.resize(static_cast<std::size_t>(spec.m_ads));
    sched.times.front() = 0.0;
    sched.times.back() = spec.horizon;
    for (int i = 1; i + 1 < spec.m_ads; ++i) sched.times[i] = draw_open_interval();
    std::sort(sched.times.begin() + 1, sched.times.end() - 1);
    return sched;
}

} // namespace

Schedule make_schedule(const StrategyKind& kind, const ProblemSpec& spec) {
    validate(spec);
    switch (kind.strategy) {
        case Strategy::Uniform:
            return uniform_schedule(spec);
        case Strategy::Corner:
            if (spec.m_ads < 2) throw Error(ErrorCode::InvalidArgument, "corner needs at least 2 ads");
            return corner_schedule(spec);
        case Strategy::Random:
            if (spec.m_ads < 2) throw Error(ErrorCode::InvalidArgument, "random needs at least 2 ads");
            if (!kind.seed) throw Error(ErrorCode::InvalidArgument, "random strategy needs a seed");
            return random_schedule(spec, *kind.seed);
        case Strategy::NearOptimal:
            return solve(spec).schedule;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown strategy");
}

} // namespace adpulse
