#include "adpulse/model.hpp"

#include "adpulse/error.hpp"

#include <cmath>
#include <sstream>
#include <type_traits>

namespace adpulse {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument:      return "InvalidArgument";
        case ErrorCode::Degenerate:           return "Degenerate";
        case ErrorCode::Infeasible:           return "Infeasible";
        case ErrorCode::InfeasibleClosedForm: return "InfeasibleClosedForm";
        case ErrorCode::BracketFailure:       return "BracketFailure";
        case ErrorCode::InconsistentRoot:     return "InconsistentRoot";
        case ErrorCode::SizeCap:              return "SizeCap";
    }
    return "Unknown";
}

namespace {

[[noreturn]] void invalid(const std::string& msg) {
    throw Error(ErrorCode::InvalidArgument, msg);
}

} // namespace

void validate(const ProblemSpec& spec) {
    if (spec.m_ads < 1) invalid("m_ads must be >= 1");
    if (!std::isfinite(spec.horizon) || spec.horizon <= 0.0) invalid("horizon must be > 0");
    if (!(spec.delta >= 0.0 && spec.delta <= 1.0)) invalid("delta must lie in [0, 1]");
    if (!std::isfinite(spec.ad_size) || spec.ad_size < 0.0) invalid("ad_size must be >= 0");
    if (spec.ad_size > 0.0 && spec.m_ads * spec.ad_size > spec.horizon) {
        std::ostringstream os;
        os << spec.m_ads << " ads of size " << spec.ad_size << " do not fit in horizon "
           << spec.horizon;
        throw Error(ErrorCode::Infeasible, os.str());
    }
}

void validate(const ProblemSpec& spec, const Schedule& sched) {
    validate(spec);
    if (sched.size() != static_cast<std::size_t>(spec.m_ads)) {
        invalid("schedule length " + std::to_string(sched.size()) + " != m_ads " +
                std::to_string(spec.m_ads));
    }
    for (std::size_t i = 0; i < sched.size(); ++i) {
        const double t = sched[i];
        if (!std::isfinite(t) || t < 0.0 || t > spec.horizon) {
            invalid("schedule time " + std::to_string(i) + " outside [0, horizon]");
        }
        if (i > 0 && sched[i - 1] > t) invalid("schedule times must be nondecreasing");
    }
}

double decay_pow(double delta, double x) noexcept {
    if (delta == 1.0) return 1.0;
    if (delta == 0.0) {
        if (x == 0.0) return 1.0;
        return x > 0.0 ? 0.0 : HUGE_VAL;
    }
    return std::exp(x * std::log(delta));
}

double eval_loss(const ProblemSpec& spec, const Schedule& sched) {
    validate(spec, sched);
    const auto& t = sched.times;
    const std::size_t m = t.size();

    if (spec.delta == 1.0) return 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);

    if (spec.delta == 0.0) {
        // Only pairs exactly ad_size apart (coincident pairs for instantaneous ads) survive.
        long double sum = 0.0L;
        for (std::size_t i = 1; i < m; ++i)
            for (std::size_t j = 0; j < i; ++j) sum += decay_pow(0.0, t[i] - t[j] - spec.ad_size);
        return static_cast<double>(sum);
    }

    // Extended-precision powers keep exact cases exact (0.5^3 = 0.125).
    const long double delta = spec.delta;
    long double sum = 0.0L;
    for (std::size_t i = 1; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j) sum += std::pow(delta, static_cast<long double>(t[i] - t[j]));
    if (spec.ad_size > 0.0) sum *= std::pow(delta, -static_cast<long double>(spec.ad_size));
    return static_cast<double>(sum);
}

std::vector<double> eval_gradient(const ProblemSpec& spec, const Schedule& sched) {
    validate(spec, sched);
    if (spec.delta == 0.0 || spec.delta == 1.0)
        throw Error(ErrorCode::Degenerate, "gradient undefined for delta in {0, 1}");

    const auto& t = sched.times;
    const std::size_t m = t.size();
    const double log_delta = std::log(spec.delta);
    const double scale = log_delta * std::exp(-spec.ad_size * log_delta);

    std::vector<double> grad(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        long double earlier = 0.0L;
        long double later = 0.0L;
        for (std::size_t j = 0; j < i; ++j) earlier += std::exp((t[i] - t[j]) * log_delta);
        for (std::size_t j = i + 1; j < m; ++j) later += std::exp((t[j] - t[i]) * log_delta);
        grad[i] = scale * static_cast<double>(earlier - later);
    }
    return grad;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kConcavityTol = 1e-12;

void check_shape(double k, double c, const char* name) {
    if (!std::isfinite(k) || k < 0.0) invalid(std::string(name) + ": k must be >= 0");
    if (!std::isfinite(c) || c <= 0.0) invalid(std::string(name) + ": c must be > 0");
}

struct BaseValidator {
    void operator()(const Sigmoid& b) const { check_shape(b.k, b.c, "sigmoid"); }
    void operator()(const SaturatingExp& b) const { check_shape(b.k, b.c, "satexp"); }
    void operator()(const Tabular& b) const {
        const auto& v = b.values;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!std::isfinite(v[i]) || v[i] < 0.0) invalid("tabular reward must be nonnegative");
            if (i > 0 && v[i] < v[i - 1]) invalid("tabular reward must be nondecreasing");
            if (i > 1 && v[i] - 2.0 * v[i - 1] + v[i - 2] > kConcavityTol)
                invalid("tabular reward must be concave (index " + std::to_string(i) + ")");
        }
    }
};

} // namespace

RewardModel::RewardModel(double gamma, BaseReward base) : gamma_(gamma), base_(std::move(base)) {
    if (!std::isfinite(gamma_) || gamma_ < 0.0) invalid("gamma must be >= 0");
    std::visit(BaseValidator{}, base_);
}

double RewardModel::base_value(int i) const {
    if (i < 0) invalid("reward index must be >= 0");
    const double x = static_cast<double>(i);
    return std::visit(
        [&](const auto& b) -> double {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, Sigmoid>) {
                return b.k / (1.0 + std::exp(-b.c * x));
            } else if constexpr (std::is_same_v<B, SaturatingExp>) {
                return b.k * -std::expm1(-b.c * x);
            } else {
                if (static_cast<std::size_t>(i) >= b.values.size())
                    invalid("tabular reward has no entry for index " + std::to_string(i));
                return b.values[static_cast<std::size_t>(i)];
            }
        },
        base_);
}

double RewardModel::base_sum(int m_ads) const {
    double sum = 0.0;
    for (int i = 0; i < m_ads; ++i) sum += base_value(i);
    return sum;
}

double eval_reward(const ProblemSpec& spec, const RewardModel& model, const Schedule& sched) {
    const double loss = eval_loss(spec, sched);
    return model.base_sum(spec.m_ads) - model.gamma() * loss;
}

} // namespace adpulse
