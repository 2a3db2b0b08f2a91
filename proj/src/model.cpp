#include "rabi/model.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <string>

#include "rabi/errors.hpp"

namespace rabi {

void validate(const ModelParams& params) {
    auto bad = [](const char* field, const char* rule, double value) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string(field) + " must be " + rule + " (got " + std::to_string(value) + ")");
    };
    if (!(params.omega > 0.0) || !std::isfinite(params.omega)) bad("omega", "> 0", params.omega);
    if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) bad("lambda", ">= 0", params.lambda);
    if (!(params.omega0 >= 0.0) || !std::isfinite(params.omega0)) bad("omega0", ">= 0", params.omega0);
    if (!(params.mass > 0.0) || !std::isfinite(params.mass)) bad("mass", "> 0", params.mass);
}

namespace pauli {

Matrix identity() { return Matrix::Identity(2, 2); }

Matrix x() {
    Matrix m(2, 2);
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

Matrix y() {
    Matrix m(2, 2);
    m << 0.0, cplx(0.0, -1.0),
         cplx(0.0, 1.0), 0.0;
    return m;
}

Matrix z() {
    Matrix m(2, 2);
    m << 1.0, 0.0,
         0.0, -1.0;
    return m;
}

} // namespace pauli

Matrix kron(const Matrix& boson, const Matrix& spin) {
    return Eigen::kroneckerProduct(boson, spin).eval();
}

namespace {

double boson_parity(int n) { return n % 2 == 0 ? 1.0 : -1.0; }

// spin index carrying amplitude n in sector p: σ = (−1)^{n+1} p
int sector_spin_index(int n, ParitySector sector) {
    const double sigma = -boson_parity(n) * sign(sector);
    return sigma > 0 ? 0 : 1;
}

} // namespace

namespace detail {

Matrix full_hamiltonian_matrix(const FockRep& rep, double omega, double lambda, double omega0) {
    const Matrix& a = rep.ladder().annihilation.matrix();
    const Matrix& ad = rep.ladder().creation.matrix();
    const Matrix& n = rep.ladder().number.matrix();
    const Matrix ib = Matrix::Identity(rep.dim(), rep.dim());
    return omega * kron(n, pauli::identity()) + lambda * kron(a + ad, pauli::x()) +
           (0.5 * omega0) * kron(ib, pauli::z());
}

} // namespace detail

Observable build_full_hamiltonian(const FockRep& rep, const ModelParams& params) {
    validate(params);
    return Observable::hermitian(detail::full_hamiltonian_matrix(rep, params.omega, params.lambda, params.omega0));
}

Observable build_parity_operator(const FockRep& rep) {
    const int dim = 2 * rep.dim();
    Matrix p = Matrix::Zero(dim, dim);
    for (int n = 0; n < rep.dim(); ++n) {
        p(2 * n, 2 * n) = -boson_parity(n);
        p(2 * n + 1, 2 * n + 1) = boson_parity(n);
    }
    return Observable::hermitian(std::move(p));
}

Observable build_reduced_hamiltonian(const FockRep& rep, const ModelParams& params, ParitySector sector) {
    validate(params);
    const LadderSet& l = rep.ladder();
    Matrix h = params.omega * l.number.matrix() +
               params.lambda * (l.annihilation.matrix() + l.creation.matrix()) -
               (0.5 * params.omega0 * sign(sector)) * l.parity.matrix();
    return Observable::hermitian(std::move(h));
}

QuantumState embed_reduced_state(const QuantumState& phi, ParitySector sector) {
    if (phi.space() != Space::Boson)
        throw Error(ErrorCode::DimensionMismatch, "embed_reduced_state expects a boson-space state");
    const auto nb = static_cast<int>(phi.dim());
    Vector psi = Vector::Zero(2 * nb);
    for (int n = 0; n < nb; ++n) psi(2 * n + sector_spin_index(n, sector)) = phi.amplitudes()(n);
    return {std::move(psi), Space::SpinBoson};
}

QuantumState extract_reduced_state(const QuantumState& psi, ParitySector sector) {
    if (psi.space() != Space::SpinBoson)
        throw Error(ErrorCode::DimensionMismatch, "extract_reduced_state expects a spin-boson state");
    const auto nb = static_cast<int>(psi.boson_dim());
    Vector phi(nb);
    for (int n = 0; n < nb; ++n) phi(n) = psi.amplitudes()(2 * n + sector_spin_index(n, sector));
    return {std::move(phi), Space::Boson};
}

} // namespace rabi
