#include "adpulse/count_optimizer.hpp"

#include "adpulse/error.hpp"
#include "adpulse/solver.hpp"

namespace adpulse {

CountSweep optimize_count(const ProblemSpec& spec_template, const RewardModel& model, int max_ads) {
    if (max_ads < 1) throw Error(ErrorCode::InvalidArgument, "max_ads must be >= 1");

    CountSweep sweep;
    sweep.rows.reserve(static_cast<std::size_t>(max_ads));
    const CountSweepRow* best = nullptr;

    for (int m = 1; m <= max_ads; ++m) {
        CountSweepRow row;
        row.m_ads = m;
        ProblemSpec spec = spec_template;
        spec.m_ads = m;
        try {
            row.loss = solve(spec).loss;
            row.base_sum = model.base_sum(m);
            row.reward = row.base_sum - model.gamma() * row.loss;
        } catch (const Error& e) {
            row.valid = false;
            row.error = e.what();
        }
        sweep.rows.push_back(std::move(row));
    }

    for (const auto& row : sweep.rows)
        if (row.valid && (best == nullptr || row.reward > best->reward)) best = &row;
    if (best == nullptr) throw Error(ErrorCode::Infeasible, "no ad count in range could be solved");
    sweep.best_m = best->m_ads;
    return sweep;
}

} // namespace adpulse
