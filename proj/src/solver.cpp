#include "adpulse/solver.hpp"

#include "adpulse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace adpulse {

std::string_view to_string(SolveMode mode) noexcept {
    switch (mode) {
        case SolveMode::Interior:     return "Interior";
        case SolveMode::EndpointOnly: return "EndpointOnly";
        case SolveMode::Degenerate:   return "Degenerate";
    }
    return "Unknown";
}

namespace {

constexpr int kMaxRounds = 200;

bool is_degenerate(const ProblemSpec& spec) noexcept {
    return spec.delta == 0.0 || spec.delta == 1.0;
}

void require_boundary_count(const ProblemSpec& spec, int a) {
    const int n = spec.last_index();
    if (n < 2 || a < 1 || 2 * a > n) {
        std::ostringstream os;
        os << "boundary count " << a << " outside [1, " << n / 2 << "] for m_ads=" << spec.m_ads;
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
}

} // namespace

double log_endpoint_relation(int n, int a, double log_t_a) noexcept {
    const double ln_a = std::log(static_cast<double>(a));
    const int free_gaps = n - 2 * a;
    if (log_t_a == -std::numeric_limits<double>::infinity())
        return -std::numeric_limits<double>::infinity();
    // log1p(a T_a) is skipped when there are no interior gaps so that
    // overflowing a*T_a never turns 0 * inf into NaN.
    const double tail = free_gaps == 0 ? 0.0 : free_gaps * std::log1p(std::exp(ln_a + log_t_a));
    return -2.0 * ln_a + (free_gaps + 2) * (ln_a + log_t_a) - tail;
}

int bisection_rounds(const ProblemSpec& spec) noexcept {
    const double n = spec.last_index();
    const double budget = 3.0 * n + spec.horizon * std::log2(1.0 / spec.delta);
    if (!(budget < kMaxRounds)) return kMaxRounds;
    return std::max(1, static_cast<int>(std::ceil(budget)));
}

BoundarySearchOutcome find_boundary_count(const ProblemSpec& spec) {
    validate(spec);
    if (is_degenerate(spec))
        throw Error(ErrorCode::Degenerate, "boundary count undefined for delta in {0, 1}");
    if (spec.m_ads < 3)
        throw Error(ErrorCode::InvalidArgument, "boundary search needs at least 3 ads");

    const int n = spec.last_index();
    BoundarySearchOutcome out;
    out.log_target = spec.horizon * std::log(spec.delta);

    // Both conditions are h evaluated at the ends of [delta^T, 1]; strict
    // inequalities, so an exact tie falls through to a + 1.
    for (int a = 1; 2 * a <= n; ++a) {
        out.a = a;
        out.cond1_log_lhs = log_endpoint_relation(n, a, 0.0);
        out.cond2_log_lhs = log_endpoint_relation(n, a, out.log_target);
        if (out.cond1_log_lhs > out.log_target && out.cond2_log_lhs < out.log_target) return out;
    }
    out.endpoint_only = true;
    out.a = spec.m_ads / 2;
    return out;
}

RootSolveTrace solve_t_a(const ProblemSpec& spec, int a) {
    validate(spec);
    if (is_degenerate(spec))
        throw Error(ErrorCode::Degenerate, "T_a undefined for delta in {0, 1}");
    require_boundary_count(spec, a);

    const int n = spec.last_index();
    const double target = spec.horizon * std::log(spec.delta);
    auto h = [&](double log_t) { return log_endpoint_relation(n, a, log_t); };

    if (!(h(target) < target && h(0.0) > target)) {
        std::ostringstream os;
        os << "h(T_a) does not bracket delta^T for a=" << a << " (n=" << n
           << ", T=" << spec.horizon << ", delta=" << spec.delta << ")";
        throw Error(ErrorCode::BracketFailure, os.str());
    }

    RootSolveTrace trace;
    trace.low = std::exp(target); // 0 once delta^T underflows; h(0) = 0 still compares correctly
    trace.high = 1.0;

    const int budget = bisection_rounds(spec);
    bool exact = false;
    while (trace.rounds < budget) {
        const double mid = 0.5 * (trace.low + trace.high);
        if (!(mid > trace.low && mid < trace.high)) break;
        ++trace.rounds;
        const double value = h(std::log(mid));
        if (value == target) {
            trace.low = trace.high = mid;
            exact = true;
            break;
        }
        (value < target ? trace.low : trace.high) = mid;
    }

    if (exact) {
        trace.root = trace.low;
        trace.log_root = std::log(trace.root);
        return trace;
    }

    // Polish on ln(T_a): relative precision there is uniform, whereas the
    // linear bracket cannot resolve T_a much below 2^-200.
    double lo = trace.low > 0.0 ? std::max(std::log(trace.low), target) : target;
    double hi = std::log(trace.high);
    while (trace.refine_rounds < 4 * kMaxRounds) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        ++trace.refine_rounds;
        const double value = h(mid);
        if (value == target) {
            lo = hi = mid;
            break;
        }
        (value < target ? lo : hi) = mid;
    }
    trace.log_root = 0.5 * (lo + hi);
    trace.low = std::max(trace.low, std::exp(lo));
    trace.high = std::min(trace.high, std::exp(hi));
    trace.root = std::clamp(std::exp(trace.log_root), trace.low, trace.high);
    return trace;
}

Schedule build_schedule(const ProblemSpec& spec, int a, double t_a_value) {
    if (!(t_a_value > 0.0))
        throw Error(ErrorCode::InvalidArgument, "T_a must be positive; use build_schedule_log");
    return build_schedule_log(spec, a, std::log(t_a_value));
}

Schedule build_schedule_log(const ProblemSpec& spec, int a, double log_t_a) {
    validate(spec);
    if (is_degenerate(spec))
        throw Error(ErrorCode::Degenerate, "closed-form schedule undefined for delta in {0, 1}");
    require_boundary_count(spec, a);

    const int n = spec.last_index();
    const double horizon = spec.horizon;
    const double slack = 1e-12 * std::max(1.0, horizon);

    double t_a = log_t_a / std::log(spec.delta);
    if (!std::isfinite(t_a) || t_a < -slack || t_a > horizon + slack)
        throw Error(ErrorCode::InvalidArgument, "T_a outside [delta^T, 1]");
    t_a = std::clamp(t_a, 0.0, horizon);

    const int free_gaps = n - 2 * a;
    if (free_gaps == 0 ? std::abs(2.0 * t_a - horizon) > 1e-9 * std::max(1.0, horizon)
                       : t_a > horizon - t_a + slack) {
        std::ostringstream os;
        os << "t_a=" << t_a << " inconsistent with t_{n-a}=" << horizon - t_a;
        throw Error(ErrorCode::InconsistentRoot, os.str());
    }

    Schedule sched;
    sched.times.assign(static_cast<std::size_t>(spec.m_ads), 0.0);
    auto& t = sched.times;
    for (int j = n - a + 1; j <= n; ++j) t[j] = horizon;

    if (free_gaps == 0) {
        t[a] = 0.5 * horizon;
        return sched;
    }

    t_a = std::min(t_a, 0.5 * horizon);
    const double t_last = horizon - t_a;
    const double gap = (t_last - t_a) / free_gaps;
    t[a] = t_a;
    t[n - a] = t_last;
    for (int k = 1; k < free_gaps; ++k) t[a + k] = t_a + k * gap;
    return sched;
}

Schedule endpoint_schedule(const ProblemSpec& spec) {
    validate(spec);
    const int m = spec.m_ads;
    const int half = m / 2;
    Schedule sched;
    sched.times.assign(static_cast<std::size_t>(m), spec.horizon);
    for (int i = 0; i < half; ++i) sched.times[i] = 0.0;
    // With an odd count the reflection symmetry of the optimum pins the
    // middle ad to T/2.
    if (m % 2 == 1) sched.times[half] = 0.5 * spec.horizon;
    return sched;
}

Schedule uniform_schedule(const ProblemSpec& spec) {
    validate(spec);
    const int n = spec.last_index();
    Schedule sched;
    sched.times.resize(static_cast<std::size_t>(spec.m_ads));
    for (int i = 0; i < n; ++i) sched.times[i] = spec.horizon * i / n;
    if (n > 0) sched.times[n] = spec.horizon;
    else sched.times[0] = 0.0;
    return sched;
}

SolveReport solve(const ProblemSpec& spec) {
    validate(spec);
    if (spec.ad_size > 0.0) return solve_sized(spec);

    SolveReport report;
    const int m = spec.m_ads;

    if (is_degenerate(spec)) {
        report.mode = SolveMode::Degenerate;
        report.schedule = uniform_schedule(spec);
        report.t_a_value = m >= 2 ? decay_pow(spec.delta, report.schedule[1]) : 1.0;
    } else if (m == 1) {
        report.schedule.times = {0.0};
        report.t_a_value = 1.0;
    } else if (m == 2) {
        report.schedule.times = {0.0, spec.horizon};
        report.t_a_value = std::exp(spec.horizon * std::log(spec.delta));
    } else {
        const BoundarySearchOutcome outcome = find_boundary_count(spec);
        report.boundary_count = outcome.a;
        if (outcome.endpoint_only) {
            report.mode = SolveMode::EndpointOnly;
            report.schedule = endpoint_schedule(spec);
            report.t_a_value = std::exp(report.schedule[outcome.a] * std::log(spec.delta));
        } else {
            const RootSolveTrace trace = solve_t_a(spec, outcome.a);
            report.t_a_value = trace.root;
            report.iterations = trace.rounds + trace.refine_rounds;
            report.schedule = build_schedule_log(spec, outcome.a, trace.log_root);
        }
    }
    report.loss = eval_loss(spec, report.schedule);
    return report;
}

SolveReport solve_sized(const ProblemSpec& spec) {
    validate(spec);
    if (spec.ad_size == 0.0) return solve(spec);

    if (spec.m_ads == 1) {
        SolveReport report;
        report.schedule.times = {0.0};
        report.mode = is_degenerate(spec) ? SolveMode::Degenerate : SolveMode::Interior;
        report.loss = eval_loss(spec, report.schedule);
        return report;
    }

    ProblemSpec reduced = spec;
    reduced.horizon = spec.horizon - spec.ad_size;
    reduced.ad_size = 0.0;

    SolveReport report = solve(reduced);
    const double first_gap = report.schedule[1] - report.schedule[0];
    if (first_gap < spec.ad_size) {
        std::ostringstream os;
        os << "closed-form first gap " << first_gap << " shorter than ad size " << spec.ad_size;
        throw Error(ErrorCode::InfeasibleClosedForm, os.str());
    }
    report.loss = eval_loss(spec, report.schedule);
    return report;
}

} // namespace adpulse
