#include "rabi/fock.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "rabi/errors.hpp"

namespace rabi {

Observable::Observable(Matrix matrix, bool hermitian)
    : matrix_(std::move(matrix)), hermitian_(hermitian) {
    if (matrix_.rows() != matrix_.cols())
        throw Error(ErrorCode::DimensionMismatch, "observable matrix must be square");
    if (hermitian_ && matrix_.size() > 0) {
        const double defect = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
        if (defect >= kHermitianTol)
            throw Error(ErrorCode::NonHermitian,
                        "matrix flagged Hermitian has ‖M − M†‖_max = " + std::to_string(defect));
    }
}

QuantumState::QuantumState(Vector amplitudes, Space space)
    : amplitudes_(std::move(amplitudes)), space_(space) {
    if (space_ == Space::SpinBoson && amplitudes_.size() % 2 != 0)
        throw Error(ErrorCode::DimensionMismatch, "spin-boson state needs an even number of amplitudes");
    const double norm = amplitudes_.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw Error(ErrorCode::InvalidArgument, "state vector has zero or non-finite norm");
    amplitudes_ /= norm;
}

Matrix GeneratorSpectrum::exp(double theta) const {
    const Vector phases = (eigenvalues * (-theta)).unaryExpr([](double x) { return std::polar(1.0, x); });
    return eigenvectors * phases.asDiagonal() * eigenvectors.adjoint();
}

Vector GeneratorSpectrum::apply_exp(double theta, const Vector& v) const {
    const Vector phases = (eigenvalues * (-theta)).unaryExpr([](double x) { return std::polar(1.0, x); });
    Vector coeffs = eigenvectors.adjoint() * v;
    coeffs.array() *= phases.array();
    return eigenvectors * coeffs;
}

struct FockRep::SpectraCache {
    int working_dim;
    std::once_flag displacement_once;
    std::once_flag squeeze_once;
    GeneratorSpectrum displacement;
    GeneratorSpectrum squeeze;
};

namespace {

GeneratorSpectrum decompose(const Matrix& generator) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(generator);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::EigDecompositionFailure, "generator eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix parity_diagonal(int dim) {
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) m(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    return m;
}

} // namespace

Matrix annihilation_matrix(int dim) {
    Matrix a = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

FockRep shared_rep(int dim, std::optional<int> working_dim) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, FockRep> registry;
    FockRep fresh(dim, working_dim);
    const std::lock_guard<std::mutex> lock(mutex);
    return registry.try_emplace({fresh.dim(), fresh.working_dim()}, std::move(fresh)).first->second;
}

LadderSet build_ladder(const FockRep& rep) {
    return rep.ladder();
}

FockRep::FockRep(int dim, std::optional<int> working_dim)
    : dim_(dim), working_dim_(working_dim.value_or(2 * dim + 20)) {
    if (dim_ < 2) throw Error(ErrorCode::InvalidArgument, "Fock dimension must be >= 2");
    if (working_dim_ < dim_) throw Error(ErrorCode::InvalidArgument, "working dimension must be >= dim");

    Matrix a = annihilation_matrix(dim_);
    Matrix ad = a.adjoint();
    Matrix n = Matrix::Zero(dim_, dim_);
    for (int k = 0; k < dim_; ++k) n(k, k) = static_cast<double>(k);
    ladder_ = std::make_shared<const LadderSet>(LadderSet{
        Observable::general(std::move(a)),
        Observable::general(std::move(ad)),
        Observable::hermitian(std::move(n)),
        Observable::hermitian(parity_diagonal(dim_)),
    });
    spectra_ = std::make_shared<SpectraCache>();
    spectra_->working_dim = working_dim_;
}

const GeneratorSpectrum& FockRep::displacement_generator() const {
    std::call_once(spectra_->displacement_once, [this] {
        const Matrix a = annihilation_matrix(working_dim_);
        const Matrix k = cplx(0.0, 1.0) * (a.adjoint() - a);
        spectra_->displacement = decompose(k);
    });
    return spectra_->displacement;
}

const GeneratorSpectrum& FockRep::squeeze_generator() const {
    std::call_once(spectra_->squeeze_once, [this] {
        const Matrix a = annihilation_matrix(working_dim_);
        const Matrix a2 = a * a;
        const Matrix k = cplx(0.0, 0.5) * (a2.adjoint() - a2);
        spectra_->squeeze = decompose(k);
    });
    return spectra_->squeeze;
}

Quadratures build_quadratures(const FockRep& rep, const ModelParams& params) {
    if (!(params.mass > 0.0)) throw Error(ErrorCode::InvalidArgument, "mass must be > 0");
    if (!(params.omega > 0.0)) throw Error(ErrorCode::InvalidArgument, "omega must be > 0");
    const Matrix& a = rep.ladder().annihilation.matrix();
    const Matrix& ad = rep.ladder().creation.matrix();
    const double mw = params.mass * params.omega;
    Matrix q = (a + ad) / std::sqrt(2.0 * mw);
    Matrix p = cplx(0.0, std::sqrt(mw / 2.0)) * (ad - a);
    return {Observable::hermitian(std::move(q)), Observable::hermitian(std::move(p))};
}

void check_displacement(const FockRep& rep, double beta) {
    if (beta * beta > rep.working_dim() / 4.0)
        throw Error(ErrorCode::AmplitudeTooLarge,
                    "|beta|^2 = " + std::to_string(beta * beta) + " exceeds working_dim/4 = " +
                        std::to_string(rep.working_dim() / 4.0));
}

void check_squeeze(double gamma) {
    if (std::abs(gamma) > 2.0)
        throw Error(ErrorCode::SqueezeTooLarge, "|gamma| = " + std::to_string(std::abs(gamma)) + " exceeds 2");
}

Observable displacement(const FockRep& rep, double beta, Extent extent) {
    check_displacement(rep, beta);
    const int n = rep.extent_dim(extent);
    if (beta == 0.0) return Observable::general(Matrix::Identity(n, n));
    const Matrix full = rep.displacement_generator().exp(beta);
    return Observable::general(full.topLeftCorner(n, n));
}

Observable squeeze(const FockRep& rep, double gamma, Extent extent) {
    check_squeeze(gamma);
    const int n = rep.extent_dim(extent);
    if (gamma == 0.0) return Observable::general(Matrix::Identity(n, n));
    const Matrix full = rep.squeeze_generator().exp(gamma);
    return Observable::general(full.topLeftCorner(n, n));
}

QuantumState vacuum(const FockRep& rep) {
    return fock_state(rep, 0);
}

QuantumState fock_state(const FockRep& rep, int n) {
    if (n < 0 || n >= rep.dim()) throw Error(ErrorCode::InvalidArgument, "Fock index out of range");
    Vector v = Vector::Zero(rep.dim());
    v(n) = 1.0;
    return {std::move(v), Space::Boson};
}

QuantumState coherent_state(const FockRep& rep, double beta) {
    Vector v(rep.dim());
    double amp = std::exp(-0.5 * beta * beta);
    for (int n = 0; n < rep.dim(); ++n) {
        if (n > 0) amp *= beta / std::sqrt(static_cast<double>(n));
        v(n) = amp;
    }
    return {std::move(v), Space::Boson};
}

cplx expectation(const QuantumState& state, const Observable& obs) {
    if (obs.dim() != state.dim())
        throw Error(ErrorCode::DimensionMismatch,
                    "state dim " + std::to_string(state.dim()) + " vs observable dim " + std::to_string(obs.dim()));
    const Vector& psi = state.amplitudes();
    return psi.dot(obs.matrix() * psi);
}

double variance(const QuantumState& state, const Observable& obs) {
    if (!obs.is_hermitian()) throw Error(ErrorCode::NonHermitian, "variance requires a Hermitian observable");
    if (obs.dim() != state.dim()) throw Error(ErrorCode::DimensionMismatch, "state/observable dimension mismatch");
    const Vector mpsi = obs.matrix() * state.amplitudes();
    const double mean = state.amplitudes().dot(mpsi).real();
    const double second = mpsi.squaredNorm();
    return std::max(0.0, second - mean * mean);
}

} // namespace rabi
