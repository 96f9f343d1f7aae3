#pragma once

#include "adpulse/model.hpp"

#include <string_view>

namespace adpulse {

enum class SolveMode {
    Interior,     // a boundary count satisfying both existence conditions was found
    EndpointOnly, // no such count; every ad sits at an endpoint (odd m: one at T/2)
    Degenerate,   // delta in {0, 1}; analytic answer
};

std::string_view to_string(SolveMode mode) noexcept;

/// Result of the linear scan over boundary counts.
///
/// Both condition values are logs of h(T_a) at the ends of [delta^T, 1];
/// `a` is accepted when cond1_log_lhs > log_target and
/// cond2_log_lhs < log_target, with log_target = T ln(delta).
struct BoundarySearchOutcome {
    bool endpoint_only = false;
    int a = 1; // accepted boundary count; floor(m_ads / 2) when endpoint_only
    double cond1_log_lhs = 0.0;
    double cond2_log_lhs = 0.0;
    double log_target = 0.0; // horizon * ln(delta)
};

/// Bisection trace for T_a = delta^(t_a) on [delta^T, 1].
///
/// `rounds` counts the bisection steps taken directly on T_a; afterwards
/// the bracket is polished by bisection on ln(T_a) (`refine_rounds`),
/// which only ever narrows it. `log_root` stays finite when T_a itself
/// underflows.
struct RootSolveTrace {
    double low = 0.0;
    double high = 1.0;
    double root = 0.0;
    double log_root = 0.0;
    int rounds = 0;
    int refine_rounds = 0;
};

struct SolveReport {
    int boundary_count = 1;
    double t_a_value = 1.0; // delta^(t_a)
    Schedule schedule;
    double loss = 0.0;
    int iterations = 0;
    SolveMode mode = SolveMode::Interior;
};

/// ln h(T_a) where h(T_a) = (1/a^2) (a T_a)^(n-2a+2) / (1 + a T_a)^(n-2a),
/// taking ln(T_a) as input so that underflowing T_a stay representable.
double log_endpoint_relation(int n, int a, double log_t_a) noexcept;

/// Bisection round budget: min(ceil(3n + T log2(1/delta)), 200).
int bisection_rounds(const ProblemSpec& spec) noexcept;

BoundarySearchOutcome find_boundary_count(const ProblemSpec& spec);

RootSolveTrace solve_t_a(const ProblemSpec& spec, int a);

Schedule build_schedule(const ProblemSpec& spec, int a, double t_a_value);

/// Same as build_schedule but takes ln(T_a); used when delta^T underflows.
Schedule build_schedule_log(const ProblemSpec& spec, int a, double log_t_a);

/// All ads at the endpoints, split evenly; with an odd count the middle ad
/// goes to T/2.
Schedule endpoint_schedule(const ProblemSpec& spec);

/// Equally spaced times i * T / n (a single ad sits at 0).
Schedule uniform_schedule(const ProblemSpec& spec);

/// Near-optimal schedule for a fixed ad count. Sized specs are routed to
/// solve_sized.
SolveReport solve(const ProblemSpec& spec);

/// Equal-size ads: solves the instantaneous problem on horizon T - s and
/// accepts it only when the first gap is at least s.
SolveReport solve_sized(const ProblemSpec& spec);

} // namespace adpulse
