#pragma once

#include <stdexcept>
#include <string>

namespace adpulse {

enum class ErrorCode {
    InvalidArgument,      // malformed spec, schedule, or model
    Degenerate,           // operation undefined for delta in {0, 1}
    Infeasible,           // m_ads * ad_size > horizon
    InfeasibleClosedForm, // sized ads overlap under the closed-form schedule
    BracketFailure,       // root not bracketed; indicates an upstream bug
    InconsistentRoot,     // t_a > T - t_a when building a schedule
    SizeCap,              // exhaustive search requested above its size limit
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace adpulse
