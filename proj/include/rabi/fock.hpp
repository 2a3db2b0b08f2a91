// fock.hpp: truncated Fock-space operators, states and expectation values

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <optional>

#include "rabi/params.hpp"

namespace rabi {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;

// Dense square matrix, optionally flagged Hermitian. The flag is verified on
// construction: ‖M − M†‖_max must be below kHermitianTol.
class Observable {
public:
    Observable(Matrix matrix, bool hermitian);

    static Observable hermitian(Matrix matrix) { return {std::move(matrix), true}; }
    static Observable general(Matrix matrix) { return {std::move(matrix), false}; }

    const Matrix& matrix() const noexcept { return matrix_; }
    bool is_hermitian() const noexcept { return hermitian_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }

private:
    Matrix matrix_;
    bool hermitian_;
};

enum class Space { Boson, SpinBoson };

// Unit-norm amplitude vector. Spin⊗boson amplitudes use the index i = 2n + s
// with s = 0 for σ_z = +1 and s = 1 for σ_z = −1.
class QuantumState {
public:
    // Normalizes `amplitudes`; a zero vector is rejected.
    QuantumState(Vector amplitudes, Space space);

    const Vector& amplitudes() const noexcept { return amplitudes_; }
    Space space() const noexcept { return space_; }
    Eigen::Index dim() const noexcept { return amplitudes_.size(); }
    Eigen::Index boson_dim() const noexcept {
        return space_ == Space::Boson ? amplitudes_.size() : amplitudes_.size() / 2;
    }

private:
    Vector amplitudes_;
    Space space_;
};

struct LadderSet {
    Observable annihilation;
    Observable creation;
    Observable number;
    Observable parity; // cos(π a†a) = diag((−1)ⁿ)
};

struct Quadratures {
    Observable q;
    Observable p;
};

// Spectral decomposition K = V diag(λ) V† of a Hermitian generator, used to
// form exp(−iθK) for real θ.
struct GeneratorSpectrum {
    Eigen::VectorXd eigenvalues;
    Matrix eigenvectors;

    Matrix exp(double theta) const;
    Vector apply_exp(double theta, const Vector& v) const;
};

enum class Extent { Truncated, Working };

// Boson space spanned by |0⟩..|N−1⟩. Unitaries are exponentiated in a larger
// working space (default 2N + 20) and truncated back to N.
class FockRep {
public:
    explicit FockRep(int dim, std::optional<int> working_dim = std::nullopt);

    int dim() const noexcept { return dim_; }
    int working_dim() const noexcept { return working_dim_; }
    int extent_dim(Extent e) const noexcept { return e == Extent::Truncated ? dim_ : working_dim_; }

    const LadderSet& ladder() const noexcept { return *ladder_; }

    // i(a† − a) and i(a†² − a²)/2 in the working space. Decomposed on first
    // use; the cache is shared between copies and safe across threads.
    const GeneratorSpectrum& displacement_generator() const;
    const GeneratorSpectrum& squeeze_generator() const;

private:
    struct SpectraCache;

    int dim_;
    int working_dim_;
    std::shared_ptr<const LadderSet> ladder_;
    std::shared_ptr<SpectraCache> spectra_;
};

// Raw N×N annihilation matrix, A[n−1, n] = √n.
// Process-wide shared representation of the given size. Copies share the
// lazily built generator spectra, so repeated use skips the eigendecompositions.
FockRep shared_rep(int dim, std::optional<int> working_dim = std::nullopt);

Matrix annihilation_matrix(int dim);

LadderSet build_ladder(const FockRep& rep);

// q = (a + a†)/√(2mω), p = i√(mω/2)(a† − a)
Quadratures build_quadratures(const FockRep& rep, const ModelParams& params);

// D(β) = exp(β(a† − a)). Requires β² ≤ working_dim/4 (AmplitudeTooLarge).
Observable displacement(const FockRep& rep, double beta, Extent extent = Extent::Truncated);

// S(γ) = exp(γ(a†² − a²)/2). Requires |γ| ≤ 2 (SqueezeTooLarge).
// With this sign, S†aS = a coshγ + a† sinhγ: γ > 0 stretches q.
Observable squeeze(const FockRep& rep, double gamma, Extent extent = Extent::Truncated);

void check_displacement(const FockRep& rep, double beta);
void check_squeeze(double gamma);

// Vacuum and coherent states in the boson space of `rep`.
QuantumState vacuum(const FockRep& rep);
QuantumState fock_state(const FockRep& rep, int n);
QuantumState coherent_state(const FockRep& rep, double beta);

cplx expectation(const QuantumState& state, const Observable& obs);
double variance(const QuantumState& state, const Observable& obs);

} // namespace rabi
