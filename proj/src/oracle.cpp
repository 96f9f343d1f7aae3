#include "adpulse/oracle.hpp"

#include "adpulse/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace adpulse {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 80;
constexpr double kMinStep = 1e-12;
constexpr double kMaxStep = 1e12;

/// L(y) - L(x) summed pairwise through expm1, so that differences far
/// below the loss magnitude are still resolved.
double loss_change(const std::vector<double>& x, const std::vector<double>& y, double log_delta) {
    long double change = 0.0L;
    for (std::size_t i = 1; i < x.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double before = (x[i] - x[j]) * log_delta;
            const double shift = ((y[i] - x[i]) - (y[j] - x[j])) * log_delta;
            change += std::exp(before) * std::expm1(shift);
        }
    }
    return static_cast<double>(change);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

} // namespace

void project_schedule(std::vector<double>& times, double horizon) {
    for (double& t : times) t = std::clamp(t, 0.0, horizon);
    std::sort(times.begin(), times.end());
}

OracleResult minimize_loss(const ProblemSpec& spec, double tol, int max_iters, bool keep_trace) {
    validate(spec);
    if (spec.delta <= 0.0 || spec.delta >= 1.0)
        throw Error(ErrorCode::Degenerate, "oracle needs delta strictly inside (0, 1)");
    if (spec.m_ads < 2) throw Error(ErrorCode::InvalidArgument, "oracle needs at least 2 ads");
    if (!(tol > 0.0) || max_iters < 0)
        throw Error(ErrorCode::InvalidArgument, "oracle needs tol > 0 and max_iters >= 0");

    const double horizon = spec.horizon;
    const double log_delta = std::log(spec.delta);
    const std::size_t m = static_cast<std::size_t>(spec.m_ads);

    Schedule current;
    current.times.resize(m);
    for (std::size_t i = 0; i < m; ++i) current.times[i] = horizon * static_cast<double>(i) / (m - 1);
    current.times.back() = horizon;

    auto interior_gradient = [&](const Schedule& s) {
        std::vector<double> g = eval_gradient(spec, s);
        g.front() = 0.0;
        g.back() = 0.0;
        return g;
    };
    auto step_to = [&](const std::vector<double>& x, const std::vector<double>& g, double alpha) {
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - alpha * g[i];
        y.front() = 0.0;
        y.back() = horizon;
        project_schedule(y, horizon);
        return y;
    };
    auto projected_norm = [&](const std::vector<double>& x, const std::vector<double>& g) {
        const std::vector<double> y = step_to(x, g, 1.0);
        double norm = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) norm = std::max(norm, std::abs(x[i] - y[i]));
        return norm;
    };

    OracleResult result;
    std::vector<double> grad = interior_gradient(current);
    // Trace entries accumulate the accepted pairwise changes; a fresh
    // eval_loss would reintroduce rounding noise of order ulp(L).
    double traced_loss = keep_trace ? eval_loss(spec, current) : 0.0;
    double alpha = 1.0;

    while (true) {
        result.projected_gradient = projected_norm(current.times, grad);
        if (result.projected_gradient <= tol) {
            result.converged = true;
            break;
        }
        if (result.iterations >= max_iters) break;

        std::vector<double> next;
        double change = 0.0;
        bool accepted = false;
        for (int k = 0; k < kMaxHalvings && alpha >= kMinStep; ++k, alpha *= 0.5) {
            next = step_to(current.times, grad, alpha);
            std::vector<double> move(m);
            for (std::size_t i = 0; i < m; ++i) move[i] = next[i] - current.times[i];
            change = loss_change(current.times, next, log_delta);
            if (change <= kArmijo * dot(grad, move)) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break; // stalled at floating-point resolution

        Schedule candidate{std::move(next)};
        std::vector<double> next_grad = interior_gradient(candidate);

        std::vector<double> s(m), yv(m);
        for (std::size_t i = 0; i < m; ++i) {
            s[i] = candidate.times[i] - current.times[i];
            yv[i] = next_grad[i] - grad[i];
        }
        const double sy = dot(s, yv);
        alpha = sy > 0.0 ? dot(s, s) / sy : 2.0 * alpha;
        alpha = std::clamp(alpha, kMinStep, kMaxStep);

        current = std::move(candidate);
        grad = std::move(next_grad);
        ++result.iterations;
        if (keep_trace) {
            traced_loss += change;
            result.loss_trace.push_back(traced_loss);
        }
    }

    result.loss = eval_loss(spec, current);
    result.schedule = std::move(current);
    return result;
}

OracleResult grid_search(const ProblemSpec& spec, int grid_points) {
    validate(spec);
    if (spec.m_ads > kGridMaxAds)
        throw Error(ErrorCode::SizeCap, "grid search supports at most 5 ads");
    if (grid_points > kGridMaxPoints)
        throw Error(ErrorCode::SizeCap, "grid search supports at most 200 grid points");
    if (grid_points < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points");

    const double horizon = spec.horizon;
    const int m = spec.m_ads;

    OracleResult best;
    best.converged = true;
    if (m == 1) {
        best.schedule.times = {0.0};
        best.loss = eval_loss(spec, best.schedule);
        return best;
    }

    std::vector<double> grid(static_cast<std::size_t>(grid_points));
    for (int k = 0; k < grid_points; ++k) grid[k] = horizon * k / (grid_points - 1);
    grid.back() = horizon;

    Schedule candidate;
    candidate.times.assign(static_cast<std::size_t>(m), 0.0);
    candidate.times.back() = horizon;
    best.loss = HUGE_VAL;

    // Interior indices are enumerated as nondecreasing tuples.
    std::vector<int> idx(static_cast<std::size_t>(m - 2), 0);
    std::function<void(std::size_t, int)> visit = [&](std::size_t pos, int start) {
        if (pos == idx.size()) {
            for (std::size_t i = 0; i < idx.size(); ++i) candidate.times[i + 1] = grid[idx[i]];
            const double loss = eval_loss(spec, candidate);
            ++best.iterations;
            if (loss < best.loss) {
                best.loss = loss;
                best.schedule = candidate;
            }
            return;
        }
        for (int k = start; k < grid_points; ++k) {
            idx[pos] = k;
            visit(pos + 1, k);
        }
    };
    visit(0, 0);
    return best;
}

} // namespace adpulse
