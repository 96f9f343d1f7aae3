#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace adpulse {

/// One scheduling instance: how many ads, over what horizon, and how fast
/// the satiation effect of a past ad fades.
///
/// m_ads is the user-facing count. Closed-form formulas index ads
/// 0..n with n = m_ads - 1; use last_index() for that.
struct ProblemSpec {
    int m_ads = 1;
    double horizon = 1.0;
    double delta = 0.5;   // per-unit-time retention of an ad's negative effect
    double ad_size = 0.0; // 0 means instantaneous ads

    int last_index() const noexcept { return m_ads - 1; }
};

/// Throws Error(InvalidArgument) or Error(Infeasible) when the spec
/// violates its invariants.
void validate(const ProblemSpec& spec);

/// Display times t_0 <= t_1 <= ... <= t_n, all inside [0, horizon].
struct Schedule {
    std::vector<double> times;

    std::size_t size() const noexcept { return times.size(); }
    double operator[](std::size_t i) const { return times[i]; }
};

void validate(const ProblemSpec& spec, const Schedule& sched);

/// delta^x with the conventions used throughout: delta = 1 gives 1,
/// delta = 0 gives 1 at x = 0 and 0 for x > 0.
double decay_pow(double delta, double x) noexcept;

/// Pairwise satiation loss: sum over j < i of delta^(t_i - t_j), scaled by
/// delta^(-ad_size) for sized ads.
double eval_loss(const ProblemSpec& spec, const Schedule& sched);

/// Gradient of eval_loss with respect to each display time. Requires
/// delta strictly inside (0, 1).
std::vector<double> eval_gradient(const ProblemSpec& spec, const Schedule& sched);

// ---------------------------------------------------------------------------
// Reward model
// ---------------------------------------------------------------------------

/// B(i) = k / (1 + exp(-c i))
struct Sigmoid {
    double k;
    double c;
};

/// B(i) = k (1 - exp(-c i))
struct SaturatingExp {
    double k;
    double c;
};

/// Explicit B(0), B(1), ... list; must be nonnegative, nondecreasing and
/// concave in the index.
struct Tabular {
    std::vector<double> values;
};

using BaseReward = std::variant<Sigmoid, SaturatingExp, Tabular>;

class RewardModel {
public:
    RewardModel(double gamma, BaseReward base);

    double gamma() const noexcept { return gamma_; }
    const BaseReward& base() const noexcept { return base_; }

    /// B(i) for the i-th ad (0-based).
    double base_value(int i) const;

    /// Sum of B(0) .. B(m_ads - 1).
    double base_sum(int m_ads) const;

private:
    double gamma_;
    BaseReward base_;
};

/// Total reward: sum of B(i) minus gamma times the loss.
double eval_reward(const ProblemSpec& spec, const RewardModel& model, const Schedule& sched);

} // namespace adpulse
