#pragma once

#include "adpulse/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace adpulse::test {

// Seeded instance generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

    // Sorted times in [0, horizon]; occasionally repeats a time to hit ties.
    Schedule schedule(int m, double horizon) {
        Schedule s;
        for (int i = 0; i < m; ++i) {
            if (i > 0 && integer(0, 9) == 0)
                s.times.push_back(s.times.back());
            else
                s.times.push_back(real(0.0, horizon));
        }
        std::sort(s.times.begin(), s.times.end());
        return s;
    }

private:
    std::mt19937_64 engine_;
};

// Direct pairwise sum over the given order, with no validation.
inline double raw_loss(const std::vector<double>& t, double delta) {
    long double sum = 0.0L;
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) sum += std::pow(static_cast<long double>(delta), t[i] - t[j]);
    return static_cast<double>(sum);
}

inline double max_abs_diff(const Schedule& a, const Schedule& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

} // namespace adpulse::test
