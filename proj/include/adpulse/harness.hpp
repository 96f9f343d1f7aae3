#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adpulse::cli {

enum ExitCode : int {
    kSuccess = 0,
    kVerificationFailed = 1,
    kUsageError = 2,
    kInfeasible = 3,
    kInternalError = 4,
};

inline constexpr const char* kSweepHeader = "delta,m_ads,horizon,strategy,loss,reward";
inline constexpr const char* kSweepNHeader = "delta,m_ads,horizon,strategy,loss,reward,log10_loss";
inline constexpr const char* kCountHeader = "m_ads,loss,base_sum,reward";
inline constexpr const char* kScheduleHeader = "delta,strategy,index,time";
inline constexpr const char* kSeedEnv = "ADPULSE_SEED";

/// Shortest decimal string that parses back to exactly `value`.
std::string format_number(double value);

/// Runs one CLI invocation. `args` excludes the program name, e.g.
/// {"solve", "--ads", "3", "--horizon", "8", "--delta", "0.5"}.
/// Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace adpulse::cli
