#pragma once

#include "adpulse/model.hpp"

#include <string>
#include <vector>

namespace adpulse {

struct CountSweepRow {
    int m_ads = 0;
    double loss = 0.0;
    double base_sum = 0.0; // sum of B(i) over the m_ads ads
    double reward = 0.0;   // base_sum - gamma * loss
    bool valid = true;     // false when the solver rejected this count
    std::string error;
};

struct CountSweep {
    int best_m = 0;
    std::vector<CountSweepRow> rows; // one per m_ads = 1..max_ads, in order
};

/// Solves every count from 1 to max_ads with the closed-form solver and
/// returns the reward-maximizing one; ties go to the smaller count.
/// `spec_template.m_ads` is ignored. Rows whose solve fails are kept but
/// marked invalid and never win.
CountSweep optimize_count(const ProblemSpec& spec_template, const RewardModel& model, int max_ads);

} // namespace adpulse
