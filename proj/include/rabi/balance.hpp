// balance.hpp: balance equations, ground-state properties and Wigner bounds as
// numeric residuals on arbitrary states.
//
// A balance equation is ⟨i[H, A]⟩ = 0 (first order) or ⟨[H,[H, A]]⟩ = 0
// (second order) on a stationary state. The named forms below are checked
// against these double-commutator oracles:
//
//   kinetic balance   ⟨p²/2m⟩ − (F₀/2)⟨qσₓ⟩ − ⟨mω²q²/2⟩ = −(m/4)⟨[H,[H,q²]]⟩
//   force covariance  ⟨F_qF_e⟩ + ⟨p dF_e/dt⟩ + F₀²    = −m⟨[H,[H,ωa†a]]⟩
//
// with F_q = −mω²q, F_e = −F₀σₓ, dF_e/dt = F₀ω₀σ_y.

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rabi/fock.hpp"
#include "rabi/params.hpp"

namespace rabi {

// |⟨ψ| i[H, A] |ψ⟩|
double first_order_residual(const Observable& h, const Observable& a, const QuantumState& state);

// |⟨ψ| [H,[H, A]] |ψ⟩|
double second_order_residual(const Observable& h, const Observable& a, const QuantumState& state);

// ⟨ψ| [H,[H, A]] |ψ⟩
cplx double_commutator(const Observable& h, const Observable& a, const QuantumState& state);

// Spin⊗boson observables for one parameter point.
struct SpinBosonOps {
    Observable q, p, n;       // boson ⊗ I
    Observable q2, p2;        // q², p² ⊗ I
    Observable sx, sy, sz;    // I ⊗ σ
    Observable q_sx, p_sx, p_sy;
    Observable x_sx;          // (a + a†) ⊗ σₓ
    Observable cos_n;         // cos(πa†a) ⊗ I
    Observable n_cos;         // a†a cos(πa†a) ⊗ I
    Observable n_sz;          // a†a ⊗ σ_z
    Observable omega_n;       // ω a†a ⊗ I
};

class BalanceContext {
public:
    BalanceContext(FockRep rep, const ModelParams& params);

    const FockRep& rep() const noexcept { return rep_; }
    const ModelParams& params() const noexcept { return params_; }
    const Observable& hamiltonian() const noexcept { return hamiltonian_; }
    const SpinBosonOps& ops() const noexcept { return ops_; }
    const Quadratures& boson_quadratures() const noexcept { return boson_; }

private:
    FockRep rep_;
    ModelParams params_;
    Observable hamiltonian_;
    Quadratures boson_;
    SpinBosonOps ops_;
};

struct ForceBalance {
    double elastic;   // ⟨F_q⟩
    double external;  // ⟨F_e⟩
    double residual;  // |⟨F_q⟩ + ⟨F_e⟩|
};

ForceBalance force_balance(const QuantumState& state, const BalanceContext& ctx);

struct KineticBalance {
    double kinetic;    // ⟨p²/2m⟩
    double coupling;   // (F₀/2)⟨qσₓ⟩
    double potential;  // ⟨mω²q²/2⟩
    double value;      // kinetic − coupling − potential
    double oracle;     // −(m/4) Re⟨[H,[H,q²]]⟩
    double residual() const { return std::abs(value); }
};

KineticBalance b1_kinetic_balance(const QuantumState& state, const BalanceContext& ctx);

struct CovarianceBalance {
    double force_correlation;  // ⟨F_qF_e⟩ = mω²F₀⟨qσₓ⟩
    double momentum_rate;      // ⟨p dF_e/dt⟩ = F₀ω₀⟨pσ_y⟩
    double f0_squared;
    double value;              // sum of the three
    double oracle;             // −m Re⟨[H,[H,ωa†a]]⟩
    double residual() const { return std::abs(value); }
};

CovarianceBalance b7_covariance_balance(const QuantumState& state, const BalanceContext& ctx);

inline constexpr double kBoundSlack = 1e-9;

struct PropertyCheck {
    double value;
    double lower;
    double upper;
    bool satisfied;  // lower − 1e−9 ≤ value ≤ upper + 1e−9
};

PropertyCheck make_check(double value, double lower, double upper);

using PropertyMap = std::map<std::string, PropertyCheck>;

// Ground-state properties: energy band, σ_z/parity link and sign, qσₓ
// covariance sign, bounded a†a·parity correlation. Entries p2_* and p4_*
// need the sector label (SectorRequired otherwise).
PropertyMap property_checks(const QuantumState& state, const BalanceContext& ctx,
                            std::optional<ParitySector> sector);

struct VarianceBounds {
    double variance;          // Δ²(qσₓ)
    double c;                 // from eliminating ⟨p²/2m⟩ with the energy
    double lower;
    double upper;
    bool satisfied;
    double reduced_variance;  // Δ²_φ(q) on the sector amplitudes
    double c_literal;         // literal constant: [−(1+⟨σ_z⟩) − 3F₀⟨qσₓ⟩ − ⟨qσₓ⟩²]/(mω²)
    double lower_literal;
    double upper_literal;
};

VarianceBounds b2_variance_bounds(const QuantumState& state, const BalanceContext& ctx,
                                  std::optional<ParitySector> sector);

// W(0,0) = 2⟨cos(πa†a)⟩ on a boson-space state.
double wigner_origin(const QuantumState& boson_state);

struct WignerBounds {
    double energy;         // ⟨H̃₊⟩
    double n_tilde;        // ⟨a†a⟩ in the frame displaced by D(−λ/ω)
    double w00;
    double value;          // energy − ω n_tilde
    double lower;          // −λ²/ω − ω₀/2
    double upper;          // −λ²/ω + ω₀/2
    bool satisfied;
    double identity_residual;          // energy − (ω ñ − λ²/ω − (ω₀/4)W)
    double lower_literal;              // −ω₀/2 − 2λ²/ω
    double upper_literal;              //  ω₀/2 − 2λ²/ω
    double identity_residual_literal;  // with λ²/(2ω)
};

// DisplacementTooLarge when (λ/ω)² exceeds the working-space allowance.
WignerBounds wigner_energy_bounds(const QuantumState& boson_state, const FockRep& rep, const ModelParams& params);

struct BalanceOptions {
    double tolerance{1e-7};   // scaled by max(1, |E|)
    bool paper_literal{false};
};

struct BalanceReport {
    std::map<std::string, double> first_order;
    std::map<std::string, double> second_order;
    PropertyMap properties;
    PropertyMap literal;  // literal forms, informational only
    double state_energy{0.0};
    double tolerance{1e-7};

    double scaled_tolerance() const;
    bool residuals_ok() const;
    bool properties_ok() const;
    bool passed() const { return residuals_ok() && properties_ok(); }
    std::vector<std::string> failures() const;
};

// Full report on a spin⊗boson state with its parity sector (if known).
BalanceReport balance_report(const QuantumState& state, const BalanceContext& ctx,
                             std::optional<ParitySector> sector, const BalanceOptions& opts = {});

} // namespace rabi
