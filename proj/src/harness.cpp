#include "adpulse/harness.hpp"

#include "adpulse/baselines.hpp"
#include "adpulse/count_optimizer.hpp"
#include "adpulse/error.hpp"
#include "adpulse/oracle.hpp"
#include "adpulse/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace adpulse::cli {

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kVerifyLossTol = 1e-6;
constexpr double kVerifyTimeFloor = 1e-6;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

double parse_double(const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw UsageError("not a number: " + text);
        return v;
    } catch (const std::logic_error&) {
        throw UsageError("not a number: " + text);
    }
}

// ---------------------------------------------------------------------------
// Config files: flat "key = value" lines; '#' starts a comment. Keys mirror
// flag names with or without the leading dashes. Flags on the command line
// win over the file.
// ---------------------------------------------------------------------------

std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a path");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    if (!path) return args;

    std::ifstream in(*path);
    if (!in) throw UsageError("cannot read config file " + *path);

    auto given = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = line.substr(0, line.find('#'));
        const auto eq = line.find_first_of("=:");
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos)
            throw UsageError(*path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        key.erase(0, key.find_first_not_of('-'));
        const std::string flag = "--" + key;
        if (!given(flag)) {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

// ---------------------------------------------------------------------------

struct ModelFlags {
    std::string kind;
    std::optional<double> k, c, gamma;

    void attach(CLI::App* sub) {
        sub->add_option("--b-kind", kind, "Base reward family")->check(CLI::IsMember({"sigmoid", "satexp"}));
        sub->add_option("--k", k, "Base reward scale k");
        sub->add_option("--c", c, "Base reward rate c");
        sub->add_option("--gamma", gamma, "Weight of the satiation loss in the reward");
    }

    bool any() const { return !kind.empty() || k || c || gamma; }

    std::optional<RewardModel> build(bool required) const {
        if (!required && !any()) return std::nullopt;
        if (kind.empty() || !k || !c || !gamma)
            throw UsageError("reward model needs --b-kind, --k, --c and --gamma");
        BaseReward base = kind == "sigmoid" ? BaseReward{Sigmoid{*k, *c}} : BaseReward{SaturatingExp{*k, *c}};
        try {
            return RewardModel(*gamma, std::move(base));
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
};

struct SpecFlags {
    int ads = 0;
    double horizon = 0.0;
    double delta = 0.0;
    double size = 0.0;

    void attach(CLI::App* sub, bool with_ads = true) {
        if (with_ads)
            sub->add_option("--ads", ads, "Number of ads m (closed-form index n = m - 1)")->required();
        sub->add_option("--horizon", horizon, "Time horizon T")->required();
        sub->add_option("--delta", delta, "Decay parameter in [0, 1]")->required();
    }

    ProblemSpec spec() const { return ProblemSpec{ads, horizon, delta, size}; }
};

std::string csv_optional(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

// ---------------------------------------------------------------------------

int cmd_solve(const SpecFlags& flags, const ModelFlags& model_flags, std::ostream& out) {
    const ProblemSpec spec = flags.spec();
    const auto model = model_flags.build(false);
    validate(spec);
    const SolveReport report = solve(spec);

    json doc;
    doc["schedule"] = report.schedule.times;
    doc["a"] = report.boundary_count;
    doc["loss"] = report.loss;
    doc["mode"] = std::string(to_string(report.mode));
    doc["iterations"] = report.iterations;
    if (model) doc["reward"] = model->base_sum(spec.m_ads) - model->gamma() * report.loss;
    out << doc.dump(2) << '\n';
    return kSuccess;
}

struct SweepDeltaFlags {
    int ads = 0;
    double horizon = 0.0;
    double delta_min = 0.0;
    double delta_max = 0.0;
    int steps = 0;
    std::string strategies = "optimal,uniform,corner,random";
    std::optional<std::uint64_t> seed;
    std::string schedule_csv;
};

std::vector<StrategyKind> parse_strategies(const std::string& list, const std::optional<std::uint64_t>& seed) {
    std::vector<StrategyKind> kinds;
    for (const auto& name : split_list(list)) {
        const auto parsed = parse_strategy(name);
        if (!parsed) throw UsageError("unknown strategy '" + name + "'");
        if (*parsed == Strategy::Random && !seed)
            throw UsageError(std::string("random strategy needs --seed or ") + kSeedEnv);
        kinds.push_back({*parsed, *parsed == Strategy::Random ? seed : std::nullopt});
    }
    if (kinds.empty()) throw UsageError("no strategies given");
    return kinds;
}

int cmd_sweep_delta(const SweepDeltaFlags& flags, const ModelFlags& model_flags, std::ostream& out) {
    if (flags.steps < 2) throw UsageError("--steps must be >= 2");
    if (!(flags.delta_min < flags.delta_max)) throw UsageError("--delta-min must be < --delta-max");
    if (flags.delta_min < 0.0 || flags.delta_max > 1.0) throw UsageError("delta range must lie in [0, 1]");
    const auto kinds = parse_strategies(flags.strategies, flags.seed);
    const auto model = model_flags.build(false);

    std::ostringstream csv;
    std::ostringstream schedules;
    csv << kSweepHeader << '\n';
    schedules << kScheduleHeader << '\n';
    for (int k = 0; k < flags.steps; ++k) {
        const double delta = k + 1 == flags.steps
            ? flags.delta_max
            : flags.delta_min + (flags.delta_max - flags.delta_min) * k / (flags.steps - 1);
        const ProblemSpec spec{flags.ads, flags.horizon, delta, 0.0};
        validate(spec);
        for (const auto& kind : kinds) {
            const Schedule sched = make_schedule(kind, spec);
            const double loss = eval_loss(spec, sched);
            std::optional<double> reward;
            if (model) reward = model->base_sum(spec.m_ads) - model->gamma() * loss;
            csv << format_number(delta) << ',' << spec.m_ads << ',' << format_number(spec.horizon) << ','
                << to_string(kind.strategy) << ',' << format_number(loss) << ',' << csv_optional(reward) << '\n';
            for (std::size_t i = 0; i < sched.size(); ++i)
                schedules << format_number(delta) << ',' << to_string(kind.strategy) << ',' << i << ','
                          << format_number(sched[i]) << '\n';
        }
    }

    if (!flags.schedule_csv.empty()) {
        std::ofstream file(flags.schedule_csv, std::ios::trunc);
        if (!file) throw UsageError("cannot write " + flags.schedule_csv);
        file << schedules.str();
    }
    out << csv.str();
    return kSuccess;
}

struct SweepNFlags {
    double horizon = 0.0;
    std::string delta_list;
    int ads_min = 0;
    int ads_max = 0;
};

int cmd_sweep_n(const SweepNFlags& flags, std::ostream& out) {
    if (flags.ads_min < 1) throw UsageError("--ads-min must be >= 1");
    if (flags.ads_min > flags.ads_max) throw UsageError("--ads-min must be <= --ads-max");
    std::vector<double> deltas;
    for (const auto& item : split_list(flags.delta_list)) deltas.push_back(parse_double(item));
    if (deltas.empty()) throw UsageError("--delta-list is empty");

    std::ostringstream csv;
    csv << kSweepNHeader << '\n';
    for (double delta : deltas) {
        for (int m = flags.ads_min; m <= flags.ads_max; ++m) {
            const ProblemSpec spec{m, flags.horizon, delta, 0.0};
            validate(spec);
            const double loss = solve(spec).loss;
            csv << format_number(delta) << ',' << m << ',' << format_number(flags.horizon) << ",optimal,"
                << format_number(loss) << ",," << format_number(std::log10(loss)) << '\n';
        }
    }
    out << csv.str();
    return kSuccess;
}

struct CountFlags {
    double horizon = 0.0;
    double delta = 0.0;
    double size = 0.0;
    int max_ads = 30;
};

int cmd_optimize_count(const CountFlags& flags, const ModelFlags& model_flags, std::ostream& out) {
    const auto model = model_flags.build(true);
    if (flags.max_ads < 1) throw UsageError("--max-ads must be >= 1");
    ProblemSpec spec{1, flags.horizon, flags.delta, flags.size};
    validate(spec);
    const CountSweep sweep = optimize_count(spec, *model, flags.max_ads);

    std::ostringstream csv;
    csv << kCountHeader << '\n';
    for (const auto& row : sweep.rows) {
        csv << row.m_ads << ',';
        if (row.valid)
            csv << format_number(row.loss) << ',' << format_number(row.base_sum) << ',' << format_number(row.reward);
        else
            csv << ",,";
        csv << '\n';
    }
    csv << "best_m=" << sweep.best_m << '\n';
    out << csv.str();
    return kSuccess;
}

struct VerifyFlags {
    int grid = 0;
    double tol = kOracleDefaultTol;
    int max_iters = kOracleDefaultMaxIters;
};

int cmd_verify(const SpecFlags& spec_flags, const VerifyFlags& flags, std::ostream& out) {
    const ProblemSpec spec = spec_flags.spec();
    validate(spec);
    const SolveReport report = solve(spec);
    const int m = spec.m_ads;
    const double time_tol = std::max(std::ldexp(1.0, -(m - 1)), kVerifyTimeFloor);

    json doc;
    doc["mode"] = std::string(to_string(report.mode));
    doc["a"] = report.boundary_count;
    doc["solver_loss"] = report.loss;
    doc["loss_tolerance"] = kVerifyLossTol;
    doc["time_tolerance"] = time_tol;

    bool pass = true;
    if (spec.delta == 0.0 || spec.delta == 1.0 || m == 1) {
        // Closed-form minimum: every schedule ties at delta = 1, and
        // distinct times zero the loss at delta = 0.
        const double best = spec.delta == 1.0 ? 0.5 * m * (m - 1) : 0.0;
        doc["reference_loss"] = best;
        pass = std::abs(report.loss - best) <= kVerifyLossTol;
    } else {
        const OracleResult oracle = minimize_loss(spec, flags.tol, flags.max_iters);
        double deviation = 0.0;
        for (int i = 0; i < m; ++i)
            deviation = std::max(deviation, std::abs(report.schedule[i] - oracle.schedule[i]));
        const double diff = report.loss - oracle.loss;
        doc["oracle_loss"] = oracle.loss;
        doc["loss_diff"] = diff;
        doc["max_time_deviation"] = deviation;
        doc["oracle_converged"] = oracle.converged;
        doc["oracle_iterations"] = oracle.iterations;
        pass = std::abs(diff) <= kVerifyLossTol && deviation <= time_tol;

        if (flags.grid > 0) {
            const OracleResult grid = grid_search(spec, flags.grid);
            doc["grid_loss"] = grid.loss;
            pass = pass && report.loss <= grid.loss + kVerifyLossTol;
        }
    }
    doc["pass"] = pass;
    out << doc.dump(2) << '\n';
    return pass ? kSuccess : kVerificationFailed;
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Near-optimal ad scheduling under exponential satiation decay"};
    app.name("adpulse");
    app.require_subcommand(1);

    SpecFlags solve_spec;
    ModelFlags solve_model;
    auto* solve_cmd = app.add_subcommand("solve", "Solve one instance and print a JSON report");
    solve_spec.attach(solve_cmd);
    solve_cmd->add_option("--size", solve_spec.size, "Ad length s (0 = instantaneous)");
    solve_model.attach(solve_cmd);

    SweepDeltaFlags sweep;
    ModelFlags sweep_model;
    auto* sweep_cmd = app.add_subcommand("sweep-delta", "Compare strategies over a delta grid (CSV)");
    sweep_cmd->add_option("--ads", sweep.ads, "Number of ads m")->required();
    sweep_cmd->add_option("--horizon", sweep.horizon, "Time horizon T")->required();
    sweep_cmd->add_option("--delta-min", sweep.delta_min)->required();
    sweep_cmd->add_option("--delta-max", sweep.delta_max)->required();
    sweep_cmd->add_option("--steps,--delta-steps", sweep.steps, "Grid points, endpoints included")->required();
    sweep_cmd->add_option("--strategies", sweep.strategies, "Comma list of uniform,corner,random,optimal");
    sweep_cmd->add_option("--seed", sweep.seed, "Seed for the random strategy")->envname(kSeedEnv);
    sweep_cmd->add_option("--schedule-csv", sweep.schedule_csv, "Also write every schedule to this CSV");
    sweep_model.attach(sweep_cmd);

    SweepNFlags sweep_n;
    auto* sweep_n_cmd = app.add_subcommand("sweep-n", "Optimal loss against ad count (CSV)");
    sweep_n_cmd->add_option("--horizon", sweep_n.horizon, "Time horizon T")->required();
    sweep_n_cmd->add_option("--delta-list", sweep_n.delta_list, "Comma list of delta values")->required();
    sweep_n_cmd->add_option("--ads-min", sweep_n.ads_min)->required();
    sweep_n_cmd->add_option("--ads-max", sweep_n.ads_max)->required();

    CountFlags count;
    ModelFlags count_model;
    auto* count_cmd = app.add_subcommand("optimize-count", "Reward-maximizing number of ads (CSV)");
    count_cmd->add_option("--horizon", count.horizon, "Time horizon T")->required();
    count_cmd->add_option("--delta", count.delta, "Decay parameter in [0, 1]")->required();
    count_cmd->add_option("--max-ads", count.max_ads, "Largest ad count tried")->capture_default_str();
    count_cmd->add_option("--size", count.size, "Ad length s (0 = instantaneous)");
    count_model.attach(count_cmd);

    SpecFlags verify_spec;
    VerifyFlags verify;
    auto* verify_cmd = app.add_subcommand("verify", "Check the solver against the numeric oracle (JSON)");
    verify_spec.attach(verify_cmd);
    verify_cmd->add_option("--grid", verify.grid, "Also run an exhaustive grid with this many points (m <= 5)");
    verify_cmd->add_option("--tol", verify.tol, "Oracle projected-gradient tolerance");
    verify_cmd->add_option("--max-iters", verify.max_iters, "Oracle iteration cap");

    try {
        std::vector<std::string> args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "adpulse: " << e.what() << '\n';
        return kUsageError;
    } catch (const UsageError& e) {
        err << "adpulse: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(solve_spec, solve_model, out);
        if (sweep_cmd->parsed()) return cmd_sweep_delta(sweep, sweep_model, out);
        if (sweep_n_cmd->parsed()) return cmd_sweep_n(sweep_n, out);
        if (count_cmd->parsed()) return cmd_optimize_count(count, count_model, out);
        if (verify_cmd->parsed()) return cmd_verify(verify_spec, verify, out);
    } catch (const UsageError& e) {
        err << "adpulse: " << e.what() << '\n';
        return kUsageError;
    } catch (const Error& e) {
        err << "adpulse: " << to_string(e.code()) << ": " << e.what() << '\n';
        switch (e.code()) {
            case ErrorCode::Infeasible:
            case ErrorCode::InfeasibleClosedForm:
                return kInfeasible;
            case ErrorCode::InvalidArgument:
            case ErrorCode::Degenerate:
            case ErrorCode::SizeCap:
                return kUsageError;
            default:
                return kInternalError;
        }
    }
    return kUsageError;
}

} // namespace adpulse::cli
