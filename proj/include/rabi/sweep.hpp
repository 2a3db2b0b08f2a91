// sweep.hpp: parameter-plane sweeps producing one SweepRow per grid point

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rabi/params.hpp"

namespace rabi {

// Inclusive linear range; count == 1 is a single value.
struct Axis {
    double min{0.0};
    double max{0.0};
    int count{1};

    static Axis scalar(double v) { return {v, v, 1}; }
    // "v" or "min:max:count"
    static Axis parse(const std::string& text, const std::string& field);

    double at(int i) const;
    bool swept() const { return count > 1; }
};

enum class OutputFormat { Csv, Json };

struct RunConfig {
    Axis omega{Axis::scalar(1.0)};
    Axis lambda{Axis::scalar(0.0)};
    Axis omega0{Axis::scalar(0.0)};
    std::optional<int> dim;  // nullopt: automatic doubling
    int max_dim{256};
    double tol{1e-10};
    OutputFormat format{OutputFormat::Csv};
    std::optional<std::string> output_path;
    int jobs{0};  // 0: hardware concurrency
    unsigned long long seed{12345};
    bool paper_literal{false};

    // Throws Error(InvalidArgument) naming the offending field.
    void validate() const;
    int swept_axes() const;
};

struct SweepRow {
    double omega, lambda, omega0;
    int dim_used;
    double e_exact;
    std::string parity_label;
    double sector_gap;
    double e_var, beta_star, gamma_star, gap;
    double res_b1, res_b7, res_force;
    double w00_exact, w00_trial;
    double var_qsx, b2_lo, b2_hi;
    bool p1_ok, p2_ok, p3_ok, p4_ok, b2_ok, w_bound_ok;
};

// Column names, in CSV order.
const std::vector<std::string>& sweep_columns();

SweepRow evaluate_point(const ModelParams& params, const RunConfig& config);

// Grid points in row order: omega slowest, then lambda, then omega0. Rows are
// evaluated by `config.jobs` workers and returned in grid order.
std::vector<ModelParams> sweep_grid(const RunConfig& config);
std::vector<SweepRow> run_sweep(const RunConfig& config);

// 17 significant digits.
std::string format_double(double v);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_json(std::ostream& out, const std::vector<SweepRow>& rows);

// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

} // namespace rabi
