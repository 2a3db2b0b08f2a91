#include "doctest.h"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rabi/cli.hpp"
#include "rabi/errors.hpp"
#include "rabi/sweep.hpp"

using namespace rabi;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "rabi_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("solve") {
    SUBCASE("decoupled") {
        const Run r = cli({"solve", "--omega", "1", "--lambda", "0", "--omega0", "1"});
        CHECK(r.code == kExitOk);
        const json j = json::parse(r.out);
        CHECK(j["e_exact"].get<double>() == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(j["converged"].get<bool>());
    }
    SUBCASE("degenerate") {
        const json j = json::parse(cli({"solve", "--omega", "1", "--lambda", "0.5", "--omega0", "0"}).out);
        CHECK(j["e_exact"].get<double>() == doctest::Approx(-0.25).epsilon(1e-12));
        CHECK(j["parity_label"] == "degenerate");
    }
    SUBCASE("energy band") {
        const json j = json::parse(cli({"solve", "--lambda", "0.5", "--omega0", "1"}).out);
        CHECK(j["e_exact"].get<double>() >= -0.75);
        CHECK(j["e_exact"].get<double>() <= -0.5);
        CHECK(j["parity_label"] == "+1");
    }
    SUBCASE("csv output") {
        const Run r = cli({"solve", "--lambda", "0.5", "--omega0", "1", "--format", "csv"});
        const auto rows = parse_csv(r.out);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0][0] == "omega");
        CHECK(r.out.find('\r') == std::string::npos);
    }
    SUBCASE("under-truncated fixed dimension") {
        const Run r = cli({"solve", "--lambda", "2", "--omega0", "1", "--dim", "8"});
        CHECK(r.code == kExitNumerical);
        CHECK_FALSE(json::parse(r.out)["converged"].get<bool>());
    }
}

TEST_CASE("usage errors name the field") {
    const std::vector<std::pair<std::vector<std::string>, std::string>> cases{
        {{"solve", "--lambda", "-1"}, "lambda"},
        {{"solve", "--omega", "0"}, "omega"},
        {{"solve", "--omega0", "-0.5"}, "omega0"},
        {{"solve", "--dim", "many"}, "dim"},
        {{"solve", "--dim", "2"}, "dim"},
        {{"solve", "--tol", "0"}, "tol"},
        {{"solve", "--max-dim", "4"}, "max_dim"},
        {{"solve", "--format", "xml"}, "format"},
        {{"solve", "--lambda", "0:1:3"}, "single parameter point"},
        {{"sweep", "--lambda", "1:0:3"}, "lambda"},
        {{"sweep", "--lambda", "0:1:0"}, "lambda"},
        {{"sweep", "--lambda", "0:1:x"}, "lambda"},
        {{"sweep", "--lambda", "0:1:2", "--omega0", "0:1:2", "--omega", "1:2:2"}, "at most 2"},
        {{"sweep", "--jobs", "-1"}, "jobs"},
        {{"solve", "--config", "/nonexistent/rabi.json"}, "config"},
    };
    for (const auto& [args, field] : cases) {
        const Run r = cli(args);
        CAPTURE(args[1]);
        CHECK(r.code == kExitUsage);
        CHECK(r.err.find(field) != std::string::npos);
        CHECK(r.out.empty());
    }
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"solve", "--no-such-flag"}).code == kExitUsage);
    CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("config file") {
    const fs::path cfg = scratch("point.json");
    {
        std::ofstream f(cfg);
        f << R"({"lambda": 0.5, "omega0": 0, "tol": 1e-10})";
    }
    SUBCASE("values are read") {
        const json j = json::parse(cli({"solve", "--config", cfg.string()}).out);
        CHECK(j["e_exact"].get<double>() == doctest::Approx(-0.25).epsilon(1e-12));
    }
    SUBCASE("flags override the file") {
        const json j = json::parse(cli({"solve", "--config", cfg.string(), "--omega0", "1"}).out);
        CHECK(j["omega0"].get<double>() == 1.0);
        CHECK(j["lambda"].get<double>() == 0.5);
    }
    SUBCASE("unknown keys and bad values are usage errors") {
        const fs::path bad = scratch("bad.json");
        {
            std::ofstream f(bad);
            f << R"({"lambda": 0.5, "colour": "blue"})";
        }
        const Run r = cli({"solve", "--config", bad.string()});
        CHECK(r.code == kExitUsage);
        CHECK(r.err.find("colour") != std::string::npos);
        {
            std::ofstream f(bad);
            f << R"({"lambda": "lots"})";
        }
        CHECK(cli({"solve", "--config", bad.string()}).code == kExitUsage);
        {
            std::ofstream f(bad);
            f << "{not json";
        }
        CHECK(cli({"solve", "--config", bad.string()}).code == kExitUsage);
    }
    SUBCASE("ranges in the file drive a sweep") {
        const fs::path grid = scratch("grid.json");
        {
            std::ofstream f(grid);
            f << R"({"lambda": "0:1:3", "omega0": {"min": 0.5, "max": 0.5, "count": 1}, "jobs": 1})";
        }
        const Run r = cli({"sweep", "--config", grid.string()});
        CHECK(r.code == kExitOk);
        CHECK(parse_csv(r.out).size() == 4);
    }
}

TEST_CASE("balance") {
    SUBCASE("decoupled point") {
        const Run r = cli({"balance", "--lambda", "0", "--omega0", "1"});
        CHECK(r.code == kExitOk);
        const json j = json::parse(r.out);
        for (const auto& [k, v] : j["first_order"].items()) CHECK(v.get<double>() < 1e-9);
        for (const auto& [k, v] : j["second_order"].items()) CHECK(v.get<double>() < 1e-9);
        CHECK(j["passed"].get<bool>());
        CHECK(j["random_oracle_max_deviation"].get<double>() < 1e-9);
    }
    SUBCASE("intermediate coupling") {
        const Run r = cli({"balance", "--omega", "1", "--lambda", "1", "--omega0", "1", "--paper-literal"});
        CHECK(r.code == kExitOk);
        const json j = json::parse(r.out);
        CHECK(j["failures"].empty());
        CHECK(j.contains("paper_literal"));
        CHECK(j["random_oracle_max_deviation"].get<double>() < 1e-9);
    }
    SUBCASE("under-truncation taints the report") {
        const Run r = cli({"balance", "--lambda", "2", "--omega0", "1", "--dim", "8"});
        CHECK(r.code == kExitNumerical);
        const json j = json::parse(r.out);
        CHECK_FALSE(j["converged"].get<bool>());
        CHECK_FALSE(j["passed"].get<bool>());
        const auto& f = j["failures"];
        CHECK(std::find(f.begin(), f.end(), "not_converged") != f.end());
    }
    SUBCASE("a failing inequality gives exit 2 with the report") {
        const Run r = cli({"balance", "--lambda", "0.5", "--omega0", "0"});
        CHECK(r.code == kExitNumerical);
        const json j = json::parse(r.out);
        CHECK(j["failures"] == json::array({"properties.p4_bound"}));
    }
    SUBCASE("seed changes only the random-state probe") {
        const json a = json::parse(cli({"balance", "--lambda", "0.5", "--omega0", "1", "--seed", "1"}).out);
        const json b = json::parse(cli({"balance", "--lambda", "0.5", "--omega0", "1", "--seed", "1"}).out);
        CHECK(a == b);
    }
}

TEST_CASE("variational") {
    SUBCASE("decoupled") {
        const Run r = cli({"variational", "--lambda", "0", "--omega0", "1"});
        CHECK(r.code == kExitOk);
        const json j = json::parse(r.out);
        CHECK(std::abs(j["beta_star"].get<double>()) < 1e-6);
        CHECK(std::abs(j["gamma_star"].get<double>()) < 1e-6);
        CHECK(std::abs(j["gap"].get<double>()) < 1e-9);
    }
    SUBCASE("zero splitting") {
        const json j = json::parse(cli({"variational", "--lambda", "0.5", "--omega0", "0"}).out);
        CHECK(j["beta_star"].get<double>() == doctest::Approx(-0.5).epsilon(1e-6));
        CHECK(std::abs(j["gamma_star"].get<double>()) < 1e-6);
        CHECK(std::abs(j["gap"].get<double>()) < 1e-9);
    }
    SUBCASE("intermediate point") {
        const Run r = cli({"variational", "--omega", "1", "--omega0", "1", "--lambda", "0.5"});
        CHECK(r.code == kExitOk);
        const json j = json::parse(r.out);
        CHECK(j["gap"].get<double>() >= 0.0);
        CHECK(j["grad_norm"].get<double>() < 1e-6);
        CHECK_FALSE(j["stalled"].get<bool>());
    }
}

TEST_CASE("sweep") {
    SUBCASE("3x3 grid") {
        const Run r = cli({"sweep", "--omega", "1", "--lambda", "0:1:3", "--omega0", "0:2:3", "--jobs", "2"});
        CHECK(r.code == kExitOk);
        const auto rows = parse_csv(r.out);
        REQUIRE(rows.size() == 10);
        CHECK(rows[0] == sweep_columns());
        CHECK(sweep_columns().size() == 25);
        const auto col = [&](const char* name) {
            return std::size_t(std::find(rows[0].begin(), rows[0].end(), name) - rows[0].begin());
        };
        const double lambdas[] = {0, 0, 0, 0.5, 0.5, 0.5, 1, 1, 1};
        const double omega0s[] = {0, 1, 2, 0, 1, 2, 0, 1, 2};
        for (int i = 1; i <= 9; ++i) {
            REQUIRE(rows[i].size() == 25);
            CHECK(std::stod(rows[i][col("lambda")]) == lambdas[i - 1]);
            CHECK(std::stod(rows[i][col("omega0")]) == omega0s[i - 1]);
            CHECK(rows[i][col("p1_ok")] == "1");
            CHECK(std::stod(rows[i][col("gap")]) >= -1e-9);
            for (const char* b : {"p2_ok", "p3_ok", "p4_ok", "b2_ok", "w_bound_ok"})
                CHECK((rows[i][col(b)] == "0" || rows[i][col(b)] == "1"));
        }
        CHECK(r.out.find('\r') == std::string::npos);
    }
    SUBCASE("output is identical across runs and worker counts") {
        const std::vector<std::string> base{"sweep", "--lambda", "0:2:3", "--omega0", "0:5:3"};
        auto with_jobs = [&](const char* j) {
            auto a = base;
            a.insert(a.end(), {"--jobs", j});
            return cli(a).out;
        };
        const std::string one = with_jobs("1");
        CHECK(one == with_jobs("1"));
        CHECK(one == with_jobs("3"));
        CHECK(one == with_jobs("4"));
    }
    SUBCASE("single point agrees with solve and variational") {
        const auto rows = parse_csv(cli({"sweep", "--lambda", "0.7", "--omega0", "1.5"}).out);
        REQUIRE(rows.size() == 2);
        const json s = json::parse(cli({"solve", "--lambda", "0.7", "--omega0", "1.5"}).out);
        const json v = json::parse(cli({"variational", "--lambda", "0.7", "--omega0", "1.5"}).out);
        const auto& h = rows[0];
        auto get = [&](const char* n) { return std::stod(rows[1][std::find(h.begin(), h.end(), n) - h.begin()]); };
        CHECK(get("e_exact") == s["e_exact"].get<double>());
        CHECK(get("sector_gap") == s["sector_gap"].get<double>());
        CHECK(get("e_var") == v["e_var"].get<double>());
        CHECK(get("beta_star") == v["beta_star"].get<double>());
        CHECK(get("gamma_star") == v["gamma_star"].get<double>());
        CHECK(get("w00_trial") == doctest::Approx(v["w00_trial"].get<double>()).epsilon(1e-9));
    }
    SUBCASE("automatic and fixed dimensions agree") {
        const auto a = parse_csv(cli({"sweep", "--lambda", "0:2:3", "--omega0", "1"}).out);
        const auto b = parse_csv(cli({"sweep", "--lambda", "0:2:3", "--omega0", "1", "--dim", "160"}).out);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 1; i < a.size(); ++i) {
            CHECK(std::abs(std::stod(a[i][4]) - std::stod(b[i][4])) < 1e-9);
            CHECK(b[i][3] == "160");
        }
    }
    SUBCASE("json format") {
        const json j = json::parse(cli({"sweep", "--lambda", "0:1:2", "--format", "json"}).out);
        REQUIRE(j.is_array());
        CHECK(j.size() == 2);
        CHECK(j[0].size() == 25);
        CHECK(j[1]["lambda"].get<double>() == 1.0);
    }
    SUBCASE("file output is complete or absent") {
        const fs::path target = scratch("sweep.csv");
        fs::remove(target);
        const Run r = cli({"sweep", "--lambda", "0:1:2", "--out", target.string()});
        CHECK(r.code == kExitOk);
        CHECK(r.out.empty());
        CHECK(fs::exists(target));
        CHECK_FALSE(fs::exists(target.string() + ".partial"));
        std::ifstream f(target);
        const std::string text((std::istreambuf_iterator<char>(f)), {});
        CHECK(parse_csv(text).size() == 3);

        const fs::path missing = scratch("no_such_dir") / "sweep.csv";
        const Run bad = cli({"sweep", "--lambda", "0:1:2", "--out", missing.string()});
        CHECK(bad.code == kExitUsage);
        CHECK_FALSE(fs::exists(missing));
        CHECK(bad.err.find("out") != std::string::npos);
    }
}

TEST_CASE("converge") {
    SUBCASE("decoupled settles after one doubling") {
        const Run r = cli({"converge", "--lambda", "0", "--omega0", "1"});
        CHECK(r.code == kExitOk);
        const auto rows = parse_csv(r.out);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0] == std::vector<std::string>{"dim", "e_exact", "delta"});
        CHECK(rows[1][2].empty());
        CHECK(std::stod(rows[2][2]) == 0.0);
    }
    SUBCASE("deltas shrink") {
        const auto rows = parse_csv(cli({"converge", "--lambda", "1", "--omega0", "1", "--tol", "1e-13"}).out);
        REQUIRE(rows.size() >= 4);
        for (std::size_t i = 3; i < rows.size(); ++i)
            CHECK(std::abs(std::stod(rows[i][2])) <= std::abs(std::stod(rows[i - 1][2])));
    }
    SUBCASE("strong coupling needs more states") {
        const json strong = json::parse(cli({"converge", "--lambda", "2", "--omega0", "5", "--format", "json"}).out);
        const json weak = json::parse(cli({"converge", "--lambda", "0.2", "--omega0", "5", "--format", "json"}).out);
        CHECK(strong["dim_used"].get<int>() > weak["dim_used"].get<int>());
        CHECK(strong["rows"][0]["delta"].is_null());
    }
    SUBCASE("capped schedule reports non-convergence") {
        const Run r = cli({"converge", "--lambda", "2", "--omega0", "1", "--max-dim", "16"});
        CHECK(r.code == kExitNumerical);
        CHECK(parse_csv(r.out).size() == 2);
    }
}

TEST_CASE("axis parsing and csv quoting") {
    const Axis a = Axis::parse("0:2:5", "lambda");
    CHECK(a.count == 5);
    CHECK(a.at(0) == 0.0);
    CHECK(a.at(2) == 1.0);
    CHECK(a.at(4) == 2.0);
    CHECK(Axis::parse("1e-3", "tol").at(0) == 1e-3);
    CHECK_FALSE(Axis::parse("3", "x").swept());
    CHECK_THROWS_AS(Axis::parse("1:2", "x"), Error);
    CHECK_THROWS_AS(Axis::parse("", "x"), Error);

    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(-1.0 / 3.0)) == -1.0 / 3.0);
}
