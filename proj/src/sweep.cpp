#include "rabi/sweep.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>

#include "rabi/balance.hpp"
#include "rabi/errors.hpp"
#include "rabi/model.hpp"
#include "rabi/solver.hpp"
#include "rabi/variational.hpp"

namespace rabi {

namespace {

double parse_number(const std::string& text, const std::string& field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, field + ": cannot parse '" + text + "' as a number");
    }
}

} // namespace

Axis Axis::parse(const std::string& text, const std::string& field) {
    const auto first = text.find(':');
    if (first == std::string::npos) return scalar(parse_number(text, field));
    const auto second = text.find(':', first + 1);
    if (second == std::string::npos || text.find(':', second + 1) != std::string::npos)
        throw Error(ErrorCode::InvalidArgument, field + ": expected 'min:max:count', got '" + text + "'");
    Axis a;
    a.min = parse_number(text.substr(0, first), field);
    a.max = parse_number(text.substr(first + 1, second - first - 1), field);
    const double count = parse_number(text.substr(second + 1), field);
    if (count != std::floor(count) || count < 1)
        throw Error(ErrorCode::InvalidArgument, field + ": count must be a positive integer");
    a.count = static_cast<int>(count);
    return a;
}

double Axis::at(int i) const {
    if (count == 1) return min;
    if (i == count - 1) return max;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

void RunConfig::validate() const {
    auto check_axis = [](const Axis& a, const char* name) {
        if (a.count < 1) throw Error(ErrorCode::InvalidArgument, std::string(name) + ": count must be >= 1");
        if (a.min > a.max) throw Error(ErrorCode::InvalidArgument, std::string(name) + ": min must be <= max");
    };
    check_axis(omega, "omega");
    check_axis(lambda, "lambda");
    check_axis(omega0, "omega0");
    if (swept_axes() > 2) throw Error(ErrorCode::InvalidArgument, "at most 2 axes may be swept");
    if (!(omega.min > 0.0)) throw Error(ErrorCode::InvalidArgument, "omega must be > 0");
    if (lambda.min < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
    if (omega0.min < 0.0) throw Error(ErrorCode::InvalidArgument, "omega0 must be >= 0");
    if (dim && *dim < 4) throw Error(ErrorCode::InvalidArgument, "dim must be >= 4 or 'auto'");
    if (max_dim < 8) throw Error(ErrorCode::InvalidArgument, "max_dim must be >= 8");
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be > 0");
    if (jobs < 0) throw Error(ErrorCode::InvalidArgument, "jobs must be >= 0");
}

int RunConfig::swept_axes() const {
    return int(omega.swept()) + int(lambda.swept()) + int(omega0.swept());
}

const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> columns{
        "omega",     "lambda",  "omega0",     "dim_used",  "e_exact", "parity_label", "sector_gap",
        "e_var",     "beta_star", "gamma_star", "gap",     "res_b1",  "res_b7",       "res_force",
        "w00_exact", "w00_trial", "var_qsx",  "b2_lo",     "b2_hi",   "p1_ok",        "p2_ok",
        "p3_ok",     "p4_ok",   "b2_ok",      "w_bound_ok"};
    return columns;
}

SweepRow evaluate_point(const ModelParams& params, const RunConfig& config) {
    SolverOptions sopts;
    sopts.tol = config.tol;
    sopts.max_dim = config.max_dim;
    sopts.fixed_dim = config.dim;
    const GroundSolution exact = solve_rabi_ground(params, sopts);

    const BalanceContext ctx(shared_rep(exact.dim_used), params);
    const BalanceReport report = balance_report(exact.state, ctx, exact.sector);
    const auto& props = report.properties;

    VariationalOptions vopts;
    vopts.exact = sopts;
    vopts.exact_energy = exact.energy;
    const VariationalResult var = minimize_energy(params, vopts);
    const QuantumState trial = trial_state(shared_rep(vopts.dim), var.trial);

    SweepRow row{};
    row.omega = params.omega;
    row.lambda = params.lambda;
    row.omega0 = params.omega0;
    row.dim_used = exact.dim_used;
    row.e_exact = exact.energy;
    row.parity_label = exact.parity_label();
    row.sector_gap = exact.sector_gap;
    row.e_var = var.energy;
    row.beta_star = var.trial.beta;
    row.gamma_star = var.trial.gamma;
    row.gap = var.gap;
    row.res_b1 = report.second_order.at("b1");
    row.res_b7 = report.second_order.at("b7");
    row.res_force = report.first_order.at("force");
    row.w00_exact = wigner_origin(exact.reduced);
    row.w00_trial = wigner_origin(trial);
    row.var_qsx = props.at("b2").value;
    row.b2_lo = props.at("b2").lower;
    row.b2_hi = props.at("b2").upper;
    row.p1_ok = props.at("p1").satisfied;
    row.p2_ok = props.at("p2_identity").satisfied && props.at("p2_sign").satisfied;
    row.p3_ok = props.at("p3").satisfied;
    row.p4_ok = props.at("p4_bound").satisfied && props.at("p4_identity").satisfied;
    row.b2_ok = props.at("b2").satisfied;
    row.w_bound_ok = props.at("w_bound").satisfied;
    return row;
}

std::vector<ModelParams> sweep_grid(const RunConfig& config) {
    std::vector<ModelParams> grid;
    for (int i = 0; i < config.omega.count; ++i)
        for (int j = 0; j < config.lambda.count; ++j)
            for (int k = 0; k < config.omega0.count; ++k)
                grid.push_back({config.omega.at(i), config.lambda.at(j), config.omega0.at(k), 1.0});
    return grid;
}

std::vector<SweepRow> run_sweep(const RunConfig& config) {
    config.validate();
    const std::vector<ModelParams> grid = sweep_grid(config);
    std::vector<SweepRow> rows(grid.size());

    unsigned workers = config.jobs > 0 ? static_cast<unsigned>(config.jobs) : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(std::max<std::size_t>(grid.size(), 1)));

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned id) {
        try {
            for (std::size_t i = next++; i < grid.size(); i = next++) rows[i] = evaluate_point(grid[i], config);
        } catch (...) {
            errors[id] = std::current_exception();
            next = grid.size();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned id = 0; id < workers; ++id) pool.emplace_back(work, id);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    const auto& cols = sweep_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    auto d = [](double v) { return format_double(v); };
    auto b = [](bool v) { return v ? "1" : "0"; };
    for (const SweepRow& r : rows) {
        out << d(r.omega) << ',' << d(r.lambda) << ',' << d(r.omega0) << ',' << r.dim_used << ','
            << d(r.e_exact) << ',' << csv_field(r.parity_label) << ',' << d(r.sector_gap) << ','
            << d(r.e_var) << ',' << d(r.beta_star) << ',' << d(r.gamma_star) << ',' << d(r.gap) << ','
            << d(r.res_b1) << ',' << d(r.res_b7) << ',' << d(r.res_force) << ',' << d(r.w00_exact) << ','
            << d(r.w00_trial) << ',' << d(r.var_qsx) << ',' << d(r.b2_lo) << ',' << d(r.b2_hi) << ','
            << b(r.p1_ok) << ',' << b(r.p2_ok) << ',' << b(r.p3_ok) << ',' << b(r.p4_ok) << ','
            << b(r.b2_ok) << ',' << b(r.w_bound_ok) << '\n';
    }
}

void write_json(std::ostream& out, const std::vector<SweepRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const SweepRow& r : rows) {
        arr.push_back({
            {"omega", r.omega},         {"lambda", r.lambda},         {"omega0", r.omega0},
            {"dim_used", r.dim_used},   {"e_exact", r.e_exact},       {"parity_label", r.parity_label},
            {"sector_gap", r.sector_gap}, {"e_var", r.e_var},         {"beta_star", r.beta_star},
            {"gamma_star", r.gamma_star}, {"gap", r.gap},             {"res_b1", r.res_b1},
            {"res_b7", r.res_b7},       {"res_force", r.res_force},   {"w00_exact", r.w00_exact},
            {"w00_trial", r.w00_trial}, {"var_qsx", r.var_qsx},       {"b2_lo", r.b2_lo},
            {"b2_hi", r.b2_hi},         {"p1_ok", int(r.p1_ok)},      {"p2_ok", int(r.p2_ok)},
            {"p3_ok", int(r.p3_ok)},    {"p4_ok", int(r.p4_ok)},      {"b2_ok", int(r.b2_ok)},
            {"w_bound_ok", int(r.w_bound_ok)},
        });
    }
    out << arr.dump(2) << '\n';
}

} // namespace rabi
