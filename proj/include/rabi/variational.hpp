// variational.hpp: squeezed-displaced trial states S(γ)D(β)|0⟩ for the
// p = +1 sector and their energy functional
//
//   E(β, γ) = ω[β² e^{2γ} + sinh²γ] + 2λβ e^{γ} − (ω₀/2) e^{−2β²}
//
// (S†aS = a coshγ + a† sinhγ, D†aD = a + β, parity of S(γ)D(β)|0⟩ = e^{−2β²}).

#pragma once

#include <array>
#include <optional>

#include "rabi/balance.hpp"
#include "rabi/fock.hpp"
#include "rabi/params.hpp"
#include "rabi/solver.hpp"

namespace rabi {

inline constexpr double kBetaBox = 6.0;
inline constexpr double kGammaBox = 2.0;

struct TrialParams {
    double beta{0.0};
    double gamma{0.0};
};

// Throws InvalidArgument outside |β| ≤ 6, |γ| ≤ 2.
void validate(const TrialParams& t);

// S(γ)D(β)|0⟩: D is applied first. Built in the working space and, for
// Extent::Truncated, cut back to N and renormalized.
QuantumState trial_state(const FockRep& rep, TrialParams t, Extent extent = Extent::Truncated);

double energy_closed_form(TrialParams t, const ModelParams& params);

// ⟨trial|H̃₊|trial⟩ evaluated in the working space of `rep`.
double energy_numeric(const FockRep& rep, TrialParams t, const ModelParams& params);

// Central-difference gradient of energy_closed_form.
std::array<double, 2> energy_gradient(TrialParams t, const ModelParams& params, double step = 1e-5);

struct VariationalOptions {
    int dim{120};                 // Fock dimension for the embedded trial state checks
    double energy_tol{1e-10};
    double param_tol{1e-8};
    int max_evaluations{2000};
    double grad_tol{1e-6};
    SolverOptions exact{};
    std::optional<double> exact_energy;  // skips the exact solve when already known
};

struct VariationalResult {
    TrialParams trial;
    double energy;
    double exact_energy;
    double gap;
    double grad_norm;
    int iterations;  // function evaluations across all starts
    bool stalled;
    double b1_residual;
    double b7_residual;
};

// Multi-start simplex minimization of energy_closed_form over the box,
// starts {(0,0), (−λ/ω,0), (−λ/ω,±0.3)}, compared against solve_rabi_ground.
VariationalResult minimize_energy(const ModelParams& params, const VariationalOptions& opts = {});

struct StationarityCheck {
    std::array<double, 2> gradient;
    double grad_norm;
    double b1;
    double b7;
};

// Gradient of E(β,γ) alongside the kinetic/force-covariance balance residuals
// of the embedded (p = +1) trial state.
StationarityCheck stationarity_equals_balance(const ModelParams& params, TrialParams t, int dim = 120);

// Property checks and the Δ²(qσₓ) bounds on the embedded trial state.
PropertyMap trial_property_compliance(const FockRep& rep, TrialParams t, const ModelParams& params);

} // namespace rabi
