// model.hpp: Rabi Hamiltonian, parity operator and parity-reduced bosonic Hamiltonians
//
// Spin⊗boson matrices use the global ordering i = 2n + s (s = 0: σ_z = +1,
// s = 1: σ_z = −1), i.e. boson ⊗ spin Kronecker products.
// σₓ eigenvectors are |±⟩ₓ = (|↑⟩ ± |↓⟩)/√2.

#pragma once

#include "rabi/fock.hpp"
#include "rabi/params.hpp"

namespace rabi {

namespace pauli {
Matrix identity();
Matrix x();
Matrix y();
Matrix z();
} // namespace pauli

// boson ⊗ spin in the i = 2n + s ordering.
Matrix kron(const Matrix& boson, const Matrix& spin);

// H = ω a†a ⊗ I + λ (a + a†) ⊗ σₓ + (ω₀/2) I ⊗ σ_z, size 2N.
Observable build_full_hamiltonian(const FockRep& rep, const ModelParams& params);

// P = −cos(π a†a) ⊗ σ_z, diagonal with entries −(−1)ⁿ (σ_z)_ss.
Observable build_parity_operator(const FockRep& rep);

// H̃ₚ = ω a†a + λ(a + a†) − (ω₀/2) p cos(π a†a), size N.
Observable build_reduced_hamiltonian(const FockRep& rep, const ModelParams& params, ParitySector sector);

// |Ψ⟩ = (|φ⟩|+⟩ₓ − p cos(πa†a)|φ⟩|−⟩ₓ)/√2; amplitude φₙ lands on
// |n, σ = (−1)^{n+1} p⟩.
QuantumState embed_reduced_state(const QuantumState& phi, ParitySector sector);

// Inverse of embed_reduced_state: reads φₙ off the sector components of a
// spin⊗boson state (the opposite-sector weight is discarded).
QuantumState extract_reduced_state(const QuantumState& psi, ParitySector sector);

namespace detail {
// No parameter validation; used to probe the λ → −λ gauge symmetry.
Matrix full_hamiltonian_matrix(const FockRep& rep, double omega, double lambda, double omega0);
} // namespace detail

} // namespace rabi
