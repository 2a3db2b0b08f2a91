// solver.hpp: dense diagonalization and truncation-converged Rabi ground states

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rabi/fock.hpp"
#include "rabi/params.hpp"

namespace rabi {

struct Eigenpair {
    double energy;
    QuantumState state;
};

// Lowest eigenpair of a Hermitian matrix. The eigenvector phase is fixed so
// that its largest-magnitude amplitude is real and positive.
Eigenpair ground_state(const Observable& matrix, Space space = Space::Boson);

// k smallest eigenvalues, ascending.
std::vector<double> spectrum_head(const Observable& matrix, int k);

struct SolverOptions {
    double tol{1e-10};
    int max_dim{256};
    int start_dim{16};
    std::optional<int> fixed_dim;       // solve at this dim only, judged against dim/2
    double degeneracy_threshold{1e-9};  // |E₋ − E₊| below this ⇒ degenerate
};

struct ConvergenceStep {
    int dim;
    double energy;
    std::optional<double> delta; // E(dim) − E(previous dim)
};

struct GroundSolution {
    double energy;
    QuantumState state;    // spin⊗boson ground state (p = +1 representative if degenerate)
    QuantumState reduced;  // boson amplitudes φ of `state` in its sector
    ParitySector sector;
    bool degenerate;
    double sector_gap;     // E₋ − E₊ at the final dimension
    int dim_used;
    bool converged;
    double energy_delta;
    std::vector<ConvergenceStep> history;

    // "+1", "-1" or "degenerate"
    std::string parity_label() const;
};

// Diagonalizes H̃₊ and H̃₋ on the doubling schedule start_dim, 2·start_dim, …
// until |ΔE| < tol or max_dim is reached. Non-convergence is reported through
// `converged = false` with the best-effort solution.
GroundSolution solve_rabi_ground(const ModelParams& params, const SolverOptions& opts = {});

} // namespace rabi
