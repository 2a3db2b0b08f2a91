#include "rabi/balance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rabi/errors.hpp"
#include "rabi/model.hpp"

namespace rabi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dims(const Observable& h, const Observable& a, const QuantumState& s) {
    if (h.dim() != s.dim() || a.dim() != s.dim())
        throw Error(ErrorCode::DimensionMismatch, "operator and state dimensions differ");
}

void require_spin_boson(const QuantumState& s, const BalanceContext& ctx) {
    if (s.space() != Space::SpinBoson || s.dim() != 2 * ctx.rep().dim())
        throw Error(ErrorCode::DimensionMismatch,
                    "expected a spin-boson state of dimension " + std::to_string(2 * ctx.rep().dim()));
}

double mean(const QuantumState& s, const Observable& o) { return expectation(s, o).real(); }

ParitySector require_sector(std::optional<ParitySector> sector, const char* what) {
    if (!sector) throw Error(ErrorCode::SectorRequired, std::string(what) + " needs a parity sector label");
    return *sector;
}

} // namespace

double first_order_residual(const Observable& h, const Observable& a, const QuantumState& state) {
    require_dims(h, a, state);
    const Vector& psi = state.amplitudes();
    const Vector hpsi = h.matrix() * psi;
    const Vector apsi = a.matrix() * psi;
    // ⟨HA⟩ − ⟨AH⟩ with H Hermitian
    const cplx comm = hpsi.dot(apsi) - psi.dot(a.matrix() * hpsi);
    return std::abs(cplx(0.0, 1.0) * comm);
}

cplx double_commutator(const Observable& h, const Observable& a, const QuantumState& state) {
    require_dims(h, a, state);
    const Vector& psi = state.amplitudes();
    const Vector hpsi = h.matrix() * psi;
    const Vector hhpsi = h.matrix() * hpsi;
    const Matrix& am = a.matrix();
    // ⟨HHA⟩ − 2⟨HAH⟩ + ⟨AHH⟩
    return hhpsi.dot(am * psi) - 2.0 * hpsi.dot(am * hpsi) + psi.dot(am * hhpsi);
}

double second_order_residual(const Observable& h, const Observable& a, const QuantumState& state) {
    return std::abs(double_commutator(h, a, state));
}

namespace {

SpinBosonOps build_ops(const FockRep& rep, const ModelParams& params, const Quadratures& quad) {
    const Matrix& a = rep.ladder().annihilation.matrix();
    const Matrix& ad = rep.ladder().creation.matrix();
    const Matrix& n = rep.ladder().number.matrix();
    const Matrix& cos = rep.ladder().parity.matrix();
    const Matrix& q = quad.q.matrix();
    const Matrix& p = quad.p.matrix();
    const Matrix i2 = pauli::identity();
    const Matrix ib = Matrix::Identity(rep.dim(), rep.dim());
    auto herm = [](Matrix m) {
        // products of Hermitian factors can carry round-off asymmetry
        m = 0.5 * (m + m.adjoint()).eval();
        return Observable::hermitian(std::move(m));
    };
    return SpinBosonOps{
        herm(kron(q, i2)),
        herm(kron(p, i2)),
        herm(kron(n, i2)),
        herm(kron(q * q, i2)),
        herm(kron(p * p, i2)),
        herm(kron(ib, pauli::x())),
        herm(kron(ib, pauli::y())),
        herm(kron(ib, pauli::z())),
        herm(kron(q, pauli::x())),
        herm(kron(p, pauli::x())),
        herm(kron(p, pauli::y())),
        herm(kron(a + ad, pauli::x())),
        herm(kron(cos, i2)),
        herm(kron(n * cos, i2)),
        herm(kron(n, pauli::z())),
        herm(params.omega * kron(n, i2)),
    };
}

} // namespace

BalanceContext::BalanceContext(FockRep rep, const ModelParams& params)
    : rep_(std::move(rep)),
      params_(params),
      hamiltonian_(build_full_hamiltonian(rep_, params_)),
      boson_(build_quadratures(rep_, params_)),
      ops_(build_ops(rep_, params_, boson_)) {}

ForceBalance force_balance(const QuantumState& state, const BalanceContext& ctx) {
    require_spin_boson(state, ctx);
    const ModelParams& mp = ctx.params();
    const double elastic = -mp.mass * mp.omega * mp.omega * mean(state, ctx.ops().q);
    const double external = -mp.f0() * mean(state, ctx.ops().sx);
    return {elastic, external, std::abs(elastic + external)};
}

KineticBalance b1_kinetic_balance(const QuantumState& state, const BalanceContext& ctx) {
    require_spin_boson(state, ctx);
    const ModelParams& mp = ctx.params();
    const double m = mp.mass;
    KineticBalance b{};
    b.kinetic = mean(state, ctx.ops().p2) / (2.0 * m);
    b.coupling = 0.5 * mp.f0() * mean(state, ctx.ops().q_sx);
    b.potential = 0.5 * m * mp.omega * mp.omega * mean(state, ctx.ops().q2);
    b.value = b.kinetic - b.coupling - b.potential;
    b.oracle = -0.25 * m * double_commutator(ctx.hamiltonian(), ctx.ops().q2, state).real();
    return b;
}

CovarianceBalance b7_covariance_balance(const QuantumState& state, const BalanceContext& ctx) {
    require_spin_boson(state, ctx);
    const ModelParams& mp = ctx.params();
    const double f0 = mp.f0();
    CovarianceBalance b{};
    b.force_correlation = mp.mass * mp.omega * mp.omega * f0 * mean(state, ctx.ops().q_sx);
    b.momentum_rate = f0 * mp.omega0 * mean(state, ctx.ops().p_sy);
    b.f0_squared = f0 * f0;
    b.value = b.force_correlation + b.momentum_rate + b.f0_squared;
    b.oracle = -mp.mass * double_commutator(ctx.hamiltonian(), ctx.ops().omega_n, state).real();
    return b;
}

PropertyCheck make_check(double value, double lower, double upper) {
    return {value, lower, upper, lower - kBoundSlack <= value && value <= upper + kBoundSlack};
}

PropertyMap property_checks(const QuantumState& state, const BalanceContext& ctx,
                            std::optional<ParitySector> sector) {
    require_spin_boson(state, ctx);
    const ModelParams& mp = ctx.params();
    const SpinBosonOps& o = ctx.ops();
    const double w = mp.omega;
    PropertyMap out;

    const double energy = mean(state, ctx.hamiltonian());
    out["p1"] = make_check(energy, -0.5 * mp.omega0 - mp.lambda * mp.lambda / w, -0.5 * mp.omega0);

    const double sz = mean(state, o.sz);
    out["p3"] = make_check(mean(state, o.x_sx), -kInf, 0.0);
    out["p2_sign"] = make_check(sz, -kInf, 0.0);

    const int p = sign(require_sector(sector, "p2/p4"));
    out["p2_identity"] = make_check(sz + p * mean(state, o.cos_n), -1e-8, 1e-8);

    const double ncos = w * mean(state, o.n_cos);
    out["p4_bound"] = make_check(ncos, -mp.omega0, mp.omega0);
    out["p4_identity"] = make_check(ncos + p * w * mean(state, o.n_sz), -1e-8, 1e-8);
    return out;
}

VarianceBounds b2_variance_bounds(const QuantumState& state, const BalanceContext& ctx,
                                  std::optional<ParitySector> sector) {
    require_spin_boson(state, ctx);
    const ParitySector s = require_sector(sector, "b2");
    const ModelParams& mp = ctx.params();
    const double m = mp.mass, w = mp.omega, f0 = mp.f0();
    const double mw2 = m * w * w;

    const double x = mean(state, ctx.ops().q_sx);
    const double z = mean(state, ctx.ops().sz);

    VarianceBounds b{};
    b.variance = variance(state, ctx.ops().q_sx);
    b.c = (-0.5 * mp.omega0 * (1.0 + z) - 1.5 * f0 * x - mw2 * x * x) / mw2;
    const double base = 1.0 / (2.0 * m * w);
    const double drop = mp.lambda * mp.lambda / (m * w * w * w);
    b.lower = base - drop + b.c;
    b.upper = base + b.c;
    b.satisfied = b.lower - kBoundSlack <= b.variance && b.variance <= b.upper + kBoundSlack;

    const QuantumState phi = extract_reduced_state(state, s);
    b.reduced_variance = variance(phi, ctx.boson_quadratures().q);

    b.c_literal = (-(1.0 + z) - 3.0 * f0 * x - x * x) / mw2;
    b.lower_literal = base - drop + b.c_literal;
    b.upper_literal = base + b.c_literal;
    return b;
}

double wigner_origin(const QuantumState& boson_state) {
    if (boson_state.space() != Space::Boson)
        throw Error(ErrorCode::DimensionMismatch, "W(0,0) is defined on boson-space states");
    const Vector& v = boson_state.amplitudes();
    double parity = 0.0;
    for (Eigen::Index n = 0; n < v.size(); ++n) parity += (n % 2 == 0 ? 1.0 : -1.0) * std::norm(v(n));
    return 2.0 * parity;
}

WignerBounds wigner_energy_bounds(const QuantumState& boson_state, const FockRep& rep, const ModelParams& params) {
    validate(params);
    if (boson_state.space() != Space::Boson || boson_state.dim() != rep.dim())
        throw Error(ErrorCode::DimensionMismatch, "expected a boson-space state of the representation's dimension");
    const double shift = params.lambda / params.omega;
    if (shift * shift > rep.working_dim() / 4.0)
        throw Error(ErrorCode::DisplacementTooLarge,
                    "lambda/omega = " + std::to_string(shift) + " is beyond the truncation-safe displacement");

    const double w = params.omega, lam = params.lambda, w0 = params.omega0;
    WignerBounds b{};
    b.energy = expectation(boson_state, build_reduced_hamiltonian(rep, params, ParitySector::Plus)).real();
    b.w00 = wigner_origin(boson_state);

    // ρ̃ = D†(−λ/ω) ρ D(−λ/ω): the state vector D(λ/ω)|φ⟩, built in the working space
    Vector padded = Vector::Zero(rep.working_dim());
    padded.head(rep.dim()) = boson_state.amplitudes();
    const Vector shifted = shift == 0.0 ? padded : rep.displacement_generator().apply_exp(shift, padded);
    double n_tilde = 0.0;
    for (Eigen::Index n = 0; n < shifted.size(); ++n) n_tilde += static_cast<double>(n) * std::norm(shifted(n));
    b.n_tilde = n_tilde;

    b.value = b.energy - w * b.n_tilde;
    b.lower = -lam * lam / w - 0.5 * w0;
    b.upper = -lam * lam / w + 0.5 * w0;
    b.satisfied = b.lower - kBoundSlack <= b.value && b.value <= b.upper + kBoundSlack;
    b.identity_residual = b.energy - (w * b.n_tilde - lam * lam / w - 0.25 * w0 * b.w00);

    b.lower_literal = -0.5 * w0 - 2.0 * lam * lam / w;
    b.upper_literal = 0.5 * w0 - 2.0 * lam * lam / w;
    b.identity_residual_literal = b.energy - (w * b.n_tilde - lam * lam / (2.0 * w) - 0.25 * w0 * b.w00);
    return b;
}

double BalanceReport::scaled_tolerance() const {
    return tolerance * std::max(1.0, std::abs(state_energy));
}

bool BalanceReport::residuals_ok() const {
    const double tol = scaled_tolerance();
    auto ok = [tol](const auto& m) {
        return std::all_of(m.begin(), m.end(), [tol](const auto& kv) { return kv.second < tol; });
    };
    return ok(first_order) && ok(second_order);
}

bool BalanceReport::properties_ok() const {
    return std::all_of(properties.begin(), properties.end(), [](const auto& kv) { return kv.second.satisfied; });
}

std::vector<std::string> BalanceReport::failures() const {
    std::vector<std::string> out;
    const double tol = scaled_tolerance();
    for (const auto& [k, v] : first_order)
        if (!(v < tol)) out.push_back("first_order." + k);
    for (const auto& [k, v] : second_order)
        if (!(v < tol)) out.push_back("second_order." + k);
    for (const auto& [k, v] : properties)
        if (!v.satisfied) out.push_back("properties." + k);
    return out;
}

BalanceReport balance_report(const QuantumState& state, const BalanceContext& ctx,
                             std::optional<ParitySector> sector, const BalanceOptions& opts) {
    require_spin_boson(state, ctx);
    const Observable& h = ctx.hamiltonian();
    const SpinBosonOps& o = ctx.ops();

    BalanceReport r;
    r.tolerance = opts.tolerance;
    r.state_energy = mean(state, h);

    r.first_order["q"] = first_order_residual(h, o.q, state);
    r.first_order["p"] = first_order_residual(h, o.p, state);
    r.first_order["n"] = first_order_residual(h, o.n, state);
    r.first_order["q_sx"] = first_order_residual(h, o.q_sx, state);
    r.first_order["p_sx"] = first_order_residual(h, o.p_sx, state);
    r.first_order["sz"] = first_order_residual(h, o.sz, state);
    r.first_order["sy"] = first_order_residual(h, o.sy, state);
    r.first_order["force"] = force_balance(state, ctx).residual;

    const KineticBalance b1 = b1_kinetic_balance(state, ctx);
    const CovarianceBalance b7 = b7_covariance_balance(state, ctx);
    r.second_order["q_sx"] = second_order_residual(h, o.q_sx, state);
    r.second_order["omega_n"] = second_order_residual(h, o.omega_n, state);
    r.second_order["q2"] = std::abs(b1.oracle);
    r.second_order["b1"] = b1.residual();
    r.second_order["b7"] = b7.residual();

    r.properties["b1_oracle"] = make_check(b1.value - b1.oracle, -kBoundSlack, kBoundSlack);
    r.properties["b7_oracle"] = make_check(b7.value - b7.oracle, -kBoundSlack, kBoundSlack);

    if (sector) {
        r.properties.merge(property_checks(state, ctx, sector));

        for (const auto& [name, obs] : {std::pair{"sym_q", &o.q}, std::pair{"sym_p", &o.p},
                                        std::pair{"sym_sx", &o.sx}, std::pair{"sym_sy", &o.sy}})
            r.properties[name] = make_check(mean(state, *obs), -kBoundSlack, kBoundSlack);

        const VarianceBounds b2 = b2_variance_bounds(state, ctx, sector);
        r.properties["b2"] = {b2.variance, b2.lower, b2.upper, b2.satisfied};
        r.properties["b6"] = make_check(b2.variance - b2.reduced_variance, -1e-8, 1e-8);

        const QuantumState phi = extract_reduced_state(state, *sector);
        const WignerBounds wb = wigner_energy_bounds(phi, ctx.rep(), ctx.params());
        r.properties["w_origin"] = make_check(wb.w00, -2.0, 2.0);
        r.properties["w_bound"] = {wb.value, wb.lower, wb.upper, wb.satisfied};
        r.properties["w_identity"] = make_check(wb.identity_residual, -1e-9, 1e-9);

        if (opts.paper_literal) {
            r.literal["b2"] = make_check(b2.variance, b2.lower_literal, b2.upper_literal);
            r.literal["w_bound"] = make_check(wb.value, wb.lower_literal, wb.upper_literal);
            r.literal["w_identity"] = make_check(wb.identity_residual_literal, -1e-9, 1e-9);
        }
    } else {
        r.properties["p1"] = make_check(r.state_energy,
                                        -0.5 * ctx.params().omega0 -
                                            ctx.params().lambda * ctx.params().lambda / ctx.params().omega,
                                        -0.5 * ctx.params().omega0);
    }
    return r;
}

} // namespace rabi
