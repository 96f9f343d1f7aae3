#pragma once

#include "adpulse/model.hpp"

#include <vector>

namespace adpulse {

/// Numeric minimizer output used to cross-check the closed-form solver.
/// The first and last ads are pinned to 0 and T.
struct OracleResult {
    Schedule schedule;
    double loss = 0.0;
    int iterations = 0;
    bool converged = false;
    double projected_gradient = 0.0; // max-norm of x - P(x - grad) at exit
    std::vector<double> loss_trace;  // loss after each iteration (summed exact changes), when requested
};

inline constexpr double kOracleDefaultTol = 1e-10;
inline constexpr int kOracleDefaultMaxIters = 200000;

/// Projected gradient descent on the interior display times, started from
/// the uniform schedule. The projection clamps to [0, T] and re-sorts,
/// which is exact because the loss is symmetric under relabelling the ads.
/// Steps use a Barzilai-Borwein trial length with Armijo backtracking
/// (halving, sufficient-decrease factor 1e-4), so the loss never increases.
///
/// Never throws for lack of convergence; check `converged`.
OracleResult minimize_loss(const ProblemSpec& spec, double tol = kOracleDefaultTol,
                           int max_iters = kOracleDefaultMaxIters, bool keep_trace = false);

inline constexpr int kGridMaxAds = 5;
inline constexpr int kGridMaxPoints = 200;

/// Exhaustive search over nondecreasing interior tuples on a uniform grid of
/// `grid_points` over [0, T]. Rejects m_ads > 5 or grid_points > 200.
OracleResult grid_search(const ProblemSpec& spec, int grid_points);

/// Clamp every time to [0, T] and sort. Exposed for testing.
void project_schedule(std::vector<double>& times, double horizon);

} // namespace adpulse
