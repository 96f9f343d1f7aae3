#include <doctest.h>

#include "adpulse/harness.hpp"
#include "adpulse/model.hpp"
#include "support.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace adpulse;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// Minimal CSV reader: header row, then rows keyed by column name.
struct Csv {
    std::vector<std::string> header;
    std::vector<std::map<std::string, std::string>> rows;
    std::string trailer; // non-CSV summary line, if any
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::stringstream ss(text);
    std::string line;
    std::getline(ss, line);
    csv.header = split(line);
    while (std::getline(ss, line)) {
        if (line.find(',') == std::string::npos) {
            csv.trailer = line;
            continue;
        }
        const auto cells = split(line);
        REQUIRE(cells.size() == csv.header.size());
        std::map<std::string, std::string> row;
        for (std::size_t i = 0; i < cells.size(); ++i) row[csv.header[i]] = cells[i];
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

double num(const std::string& text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    REQUIRE(res.ec == std::errc());
    REQUIRE(res.ptr == text.data() + text.size());
    return v;
}

std::vector<std::string> sweep_args(std::vector<std::string> extra) {
    std::vector<std::string> args{"sweep-delta", "--ads", "16", "--horizon", "100", "--delta-min", "0.9",
                                  "--delta-max", "0.99", "--steps", "10"};
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

} // namespace

TEST_CASE("format_number is shortest round-trip") {
    CHECK(cli::format_number(0.1) == "0.1");
    CHECK(cli::format_number(20.0) == "20");
    CHECK(cli::format_number(1e-300) == "1e-300");
    test::Gen gen(51);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::exp(gen.real(-700.0, 700.0)) * (gen.integer(0, 1) ? 1 : -1);
        CHECK(num(cli::format_number(v)) == v);
    }
}

TEST_CASE("solve subcommand") {
    const Run r = invoke({"solve", "--ads", "3", "--horizon", "8", "--delta", "0.5"});
    REQUIRE(r.code == cli::kSuccess);
    const json doc = json::parse(r.out);
    CHECK(doc["schedule"] == json::array({0.0, 4.0, 8.0}));
    for (const char* key : {"schedule", "a", "loss", "mode", "iterations"}) CHECK(doc.contains(key));
    CHECK(doc["mode"] == "Interior");

    const Run eight = invoke({"solve", "--ads", "8", "--horizon", "20", "--delta", "0.9"});
    const json d8 = json::parse(eight.out);
    const ProblemSpec spec{8, 20.0, 0.9};
    const Schedule sched{d8["schedule"].get<std::vector<double>>()};
    CHECK_NOTHROW(validate(spec, sched));
    CHECK(d8["loss"].get<double>() == eval_loss(spec, sched));
    CHECK(d8["a"] == 2);

    const Run two = invoke({"solve", "--ads", "2", "--horizon", "3", "--delta", "0.5"});
    CHECK(json::parse(two.out)["loss"] == 0.125);
}

TEST_CASE("solve reports a reward only when a model is given") {
    const Run plain = invoke({"solve", "--ads", "2", "--horizon", "3", "--delta", "0.5"});
    CHECK_FALSE(json::parse(plain.out).contains("reward"));
    const Run with = invoke({"solve", "--ads", "2", "--horizon", "3", "--delta", "0.5", "--gamma", "2", "--b-kind",
                          "sigmoid", "--k", "1", "--c", "0.2"});
    CHECK(json::parse(with.out)["reward"].get<double>() == doctest::Approx(0.79983399731247790856).epsilon(1e-15));
    CHECK(invoke({"solve", "--ads", "2", "--horizon", "3", "--delta", "0.5", "--gamma", "2"}).code == cli::kUsageError);
}

TEST_CASE("solve accepts delta 0 and 1 as degenerate") {
    for (const char* d : {"0", "1"}) {
        const Run r = invoke({"solve", "--ads", "4", "--horizon", "9", "--delta", d});
        REQUIRE(r.code == cli::kSuccess);
        CHECK(json::parse(r.out)["mode"] == "Degenerate");
    }
}

TEST_CASE("exit codes") {
    CHECK(invoke({"solve", "--ads", "3", "--horizon", "8"}).code == cli::kUsageError);
    CHECK(invoke({"solve", "--ads", "3", "--horizon", "-1", "--delta", "0.5"}).code == cli::kUsageError);
    CHECK(invoke({"solve", "--ads", "x", "--horizon", "1", "--delta", "0.5"}).code == cli::kUsageError);
    CHECK(invoke({"frobnicate"}).code == cli::kUsageError);
    CHECK(invoke({}).code == cli::kUsageError);
    CHECK(invoke({"solve", "--ads", "5", "--horizon", "10", "--delta", "0.5", "--size", "2.5"}).code == cli::kInfeasible);
    CHECK(invoke({"solve", "--ads", "5", "--horizon", "10", "--delta", "0.98", "--size", "2"}).code == cli::kInfeasible);
    const Run help = invoke({"--help"});
    CHECK(help.code == cli::kSuccess);
    CHECK(help.out.find("sweep-delta") != std::string::npos);
    CHECK(invoke({"solve", "--help"}).out.find("n = m - 1") != std::string::npos);
}

TEST_CASE("sweep-delta compares strategies") {
    const Run r = invoke(sweep_args({"--strategies", "optimal,uniform,corner"}));
    REQUIRE(r.code == cli::kSuccess);
    CHECK(r.out.rfind(std::string(cli::kSweepHeader) + "\n", 0) == 0);
    const Csv csv = parse_csv(r.out);
    REQUIRE(csv.rows.size() == 30);
    for (std::size_t i = 0; i < csv.rows.size(); i += 3) {
        CHECK(csv.rows[i].at("strategy") == "optimal");
        const double best = num(csv.rows[i].at("loss"));
        for (std::size_t j = 1; j < 3; ++j) {
            CHECK(csv.rows[i + j].at("delta") == csv.rows[i].at("delta"));
            CHECK(best <= num(csv.rows[i + j].at("loss")));
        }
        CHECK(csv.rows[i].at("reward").empty());
    }
    CHECK(csv.rows.front().at("delta") == "0.9");
    CHECK(csv.rows.back().at("delta") == "0.99");
}

TEST_CASE("sweep-delta rejects malformed ranges") {
    const std::vector<std::string> base{"sweep-delta", "--ads", "16", "--horizon", "100"};
    auto with = [&](std::vector<std::string> extra) {
        auto args = base;
        args.insert(args.end(), extra.begin(), extra.end());
        return invoke(args).code;
    };
    CHECK(with({"--steps", "2", "--delta-min", "0.5", "--delta-max", "0.5", "--strategies", "uniform"}) == 2);
    CHECK(with({"--steps", "1", "--delta-min", "0.1", "--delta-max", "0.5", "--strategies", "uniform"}) == 2);
    CHECK(with({"--steps", "3", "--delta-min", "0.6", "--delta-max", "0.5", "--strategies", "uniform"}) == 2);
    CHECK(with({"--steps", "3", "--delta-min", "0.1", "--delta-max", "0.5", "--strategies", "bogus"}) == 2);
}

TEST_CASE("uniform sweep matches the geometric double sum") {
    const Run r = invoke({"sweep-delta", "--ads", "5", "--horizon", "20", "--delta-min", "0.05", "--delta-max", "0.95",
                       "--steps", "19", "--strategies", "uniform"});
    const Csv csv = parse_csv(r.out);
    REQUIRE(csv.rows.size() == 19);
    for (const auto& row : csv.rows) {
        const double d = num(row.at("delta"));
        double expected = 0.0;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < i; ++j) expected += std::pow(d, 5.0 * (i - j));
        CHECK(num(row.at("loss")) == doctest::Approx(expected).epsilon(1e-14));
    }
    // independent 17-digit value at delta = 0.7
    const Run one = invoke({"sweep-delta", "--ads", "5", "--horizon", "20", "--delta-min", "0.7", "--delta-max", "0.8",
                         "--steps", "2", "--strategies", "uniform"});
    CHECK(num(parse_csv(one.out).rows[0].at("loss")) == doctest::Approx(0.7673156203828618).epsilon(1e-15));
}

TEST_CASE("random strategy seeds") {
    const auto args = sweep_args({"--strategies", "random"});
    CHECK(invoke(args).code == cli::kUsageError);

    auto seeded = args;
    seeded.insert(seeded.end(), {"--seed", "42"});
    const Run flag = invoke(seeded);
    REQUIRE(flag.code == 0);
    CHECK(invoke(seeded).out == flag.out);

    ::setenv(cli::kSeedEnv, "42", 1);
    const Run env = invoke(args);
    auto other = args;
    other.insert(other.end(), {"--seed", "7"});
    const Run override_env = invoke(other);
    ::unsetenv(cli::kSeedEnv);
    CHECK(env.out == flag.out);
    CHECK(override_env.out != flag.out);
}

TEST_CASE("sweep-delta with a model fills the reward column and can dump schedules") {
    const auto path = (std::filesystem::temp_directory_path() / "adpulse_sched_test.csv").string();
    const Run r = invoke(sweep_args({"--strategies", "optimal,corner", "--gamma", "1", "--b-kind", "satexp", "--k", "2",
                                  "--c", "0.1", "--schedule-csv", path}));
    REQUIRE(r.code == 0);
    const Csv csv = parse_csv(r.out);
    const RewardModel model(1.0, SaturatingExp{2.0, 0.1});
    for (const auto& row : csv.rows)
        CHECK(num(row.at("reward")) == doctest::Approx(model.base_sum(16) - num(row.at("loss"))).epsilon(1e-12));

    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const Csv sched = parse_csv(buf.str());
    CHECK(sched.header == std::vector<std::string>{"delta", "strategy", "index", "time"});
    CHECK(sched.rows.size() == 10 * 2 * 16);
    std::filesystem::remove(path);
}

TEST_CASE("sweep-n") {
    const Run r = invoke({"sweep-n", "--horizon", "100", "--delta-list", "0.7,0.9,0.99", "--ads-min", "2",
                       "--ads-max", "24"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind(std::string(cli::kSweepNHeader) + "\n", 0) == 0);
    const Csv csv = parse_csv(r.out);
    REQUIRE(csv.rows.size() == 3 * 23);
    std::map<std::pair<std::string, int>, double> loss;
    for (const auto& row : csv.rows) {
        const int m = static_cast<int>(num(row.at("m_ads")));
        loss[{row.at("delta"), m}] = num(row.at("loss"));
        CHECK(num(row.at("log10_loss")) == doctest::Approx(std::log10(num(row.at("loss")))));
        if (m == 2) CHECK(num(row.at("loss")) == doctest::Approx(std::pow(num(row.at("delta")), 100.0)).epsilon(1e-14));
    }
    for (int m = 3; m <= 24; ++m) CHECK(loss[{"0.7", m}] >= loss[{"0.7", m - 1}]);
    for (int m = 2; m <= 24; ++m) CHECK(loss[{"0.99", m}] >= loss[{"0.9", m}]);

    CHECK(invoke({"sweep-n", "--horizon", "100", "--delta-list", "0.7", "--ads-min", "5", "--ads-max", "4"}).code == 2);
    CHECK(invoke({"sweep-n", "--horizon", "100", "--delta-list", "0.7", "--ads-min", "0", "--ads-max", "4"}).code == 2);
    CHECK(invoke({"sweep-n", "--horizon", "100", "--delta-list", "abc", "--ads-min", "2", "--ads-max", "4"}).code == 2);
}

TEST_CASE("optimize-count") {
    const std::vector<std::string> base{"optimize-count", "--horizon", "60", "--delta", "0.9", "--b-kind",
                                        "sigmoid", "--c", "0.2"};
    auto run_with = [&](std::vector<std::string> extra) {
        auto args = base;
        args.insert(args.end(), extra.begin(), extra.end());
        return invoke(args);
    };
    CHECK(parse_csv(run_with({"--k", "1", "--gamma", "0", "--max-ads", "12"}).out).trailer == "best_m=12");
    CHECK(parse_csv(run_with({"--k", "0", "--gamma", "1"}).out).trailer == "best_m=1");

    const Run r = run_with({"--k", "2", "--gamma", "1"});
    REQUIRE(r.code == 0);
    const Csv csv = parse_csv(r.out);
    CHECK(csv.header == std::vector<std::string>{"m_ads", "loss", "base_sum", "reward"});
    REQUIRE(csv.rows.size() == 30);
    int argmax = 0;
    double best = -HUGE_VAL;
    for (const auto& row : csv.rows)
        if (num(row.at("reward")) > best) {
            best = num(row.at("reward"));
            argmax = static_cast<int>(num(row.at("m_ads")));
        }
    CHECK(argmax > 1);
    CHECK(argmax < 30);
    CHECK(csv.trailer == "best_m=" + std::to_string(argmax));

    CHECK(run_with({"--k", "2"}).code == cli::kUsageError);
}

TEST_CASE("verify subcommand") {
    for (const auto& args : std::vector<std::vector<std::string>>{{"--ads", "3", "--horizon", "8", "--delta", "0.5"},
                                                                  {"--ads", "8", "--horizon", "20", "--delta", "0.95"},
                                                                  {"--ads", "6", "--horizon", "1", "--delta", "0.99"}}) {
        auto full = args;
        full.insert(full.begin(), "verify");
        const Run r = invoke(full);
        CHECK(r.code == cli::kSuccess);
        const json doc = json::parse(r.out);
        CHECK(doc["pass"] == true);
        CHECK(doc["max_time_deviation"].get<double>() <= doc["time_tolerance"].get<double>());
        if (args[1] == "6") CHECK((doc["mode"] == "EndpointOnly" || doc["a"].get<int>() >= 2));
        if (args[1] == "3") CHECK(doc["max_time_deviation"].get<double>() <= 1e-9);
    }
    const Run grid = invoke({"verify", "--ads", "4", "--horizon", "10", "--delta", "0.9", "--grid", "101"});
    CHECK(grid.code == 0);
    CHECK(json::parse(grid.out).contains("grid_loss"));
    CHECK(invoke({"verify", "--ads", "7", "--horizon", "10", "--delta", "0.9", "--grid", "11"}).code == 2);

    // an oracle starved of iterations cannot confirm the closed form
    const Run starved = invoke({"verify", "--ads", "12", "--horizon", "100", "--delta", "0.99", "--max-iters", "0"});
    CHECK(starved.code == cli::kVerificationFailed);
    CHECK(json::parse(starved.out)["pass"] == false);
}

TEST_CASE("config file supplies defaults that flags override") {
    const auto path = (std::filesystem::temp_directory_path() / "adpulse_config_test.cfg").string();
    {
        std::ofstream cfg(path);
        cfg << "# instance\nads = 3\n--horizon: 8\ndelta = 0.9\n";
    }
    const Run r = invoke({"solve", "--config", path, "--delta", "0.5"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["schedule"] == json::array({0.0, 4.0, 8.0}));
    CHECK(doc["loss"] == 0.12890625);
    CHECK(invoke({"solve", "--config=" + path}).out == invoke({"solve", "--ads", "3", "--horizon", "8", "--delta", "0.9"}).out);
    std::filesystem::remove(path);
    CHECK(invoke({"solve", "--config", path}).code == cli::kUsageError);
}

TEST_CASE("every subcommand is deterministic") {
    const std::vector<std::vector<std::string>> commands{
        {"solve", "--ads", "9", "--horizon", "30", "--delta", "0.93"},
        sweep_args({"--seed", "5"}),
        {"sweep-n", "--horizon", "100", "--delta-list", "0.7,0.99", "--ads-min", "4", "--ads-max", "24"},
        {"optimize-count", "--horizon", "60", "--delta", "0.9", "--b-kind", "satexp", "--k", "2", "--c", "0.1",
         "--gamma", "1"},
        {"verify", "--ads", "8", "--horizon", "20", "--delta", "0.95"},
    };
    for (const auto& args : commands) {
        const Run a = invoke(args);
        const Run b = invoke(args);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
}
