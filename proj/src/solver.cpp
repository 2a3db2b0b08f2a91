#include "rabi/solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "rabi/errors.hpp"
#include "rabi/model.hpp"

namespace rabi {

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> diagonalize(const Observable& m, bool vectors) {
    if (!m.is_hermitian()) throw Error(ErrorCode::NonHermitian, "diagonalization requires a Hermitian matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix(), vectors ? Eigen::ComputeEigenvectors
                                                                     : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::EigDecompositionFailure, "Hermitian eigensolver did not converge");
    return solver;
}

Vector fix_phase(Vector v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const cplx pivot = v(imax);
    v *= std::conj(pivot) / std::abs(pivot);
    v(imax) = std::abs(v(imax));
    return v;
}

struct SectorPair {
    Eigenpair plus;
    Eigenpair minus;
};

SectorPair solve_sectors(const ModelParams& params, int dim) {
    const FockRep rep(dim);
    return {ground_state(build_reduced_hamiltonian(rep, params, ParitySector::Plus)),
            ground_state(build_reduced_hamiltonian(rep, params, ParitySector::Minus))};
}

double lowest(const SectorPair& s) { return std::min(s.plus.energy, s.minus.energy); }

} // namespace

Eigenpair ground_state(const Observable& matrix, Space space) {
    auto solver = diagonalize(matrix, true);
    return {solver.eigenvalues()(0), QuantumState(fix_phase(solver.eigenvectors().col(0)), space)};
}

std::vector<double> spectrum_head(const Observable& matrix, int k) {
    if (k < 0 || k > matrix.dim()) throw Error(ErrorCode::InvalidArgument, "k must lie in [0, dim]");
    auto solver = diagonalize(matrix, false);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + k};
}

std::string GroundSolution::parity_label() const {
    if (degenerate) return "degenerate";
    return sector == ParitySector::Plus ? "+1" : "-1";
}

GroundSolution solve_rabi_ground(const ModelParams& params, const SolverOptions& opts) {
    validate(params);
    if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be > 0");

    std::vector<int> schedule;
    if (opts.fixed_dim) {
        const int d = *opts.fixed_dim;
        if (d < 2) throw Error(ErrorCode::InvalidArgument, "dim must be >= 2");
        if (d / 2 >= 2) schedule.push_back(d / 2);
        schedule.push_back(d);
    } else {
        if (opts.max_dim < 8) throw Error(ErrorCode::InvalidArgument, "max_dim must be >= 8");
        int d = std::min(std::max(opts.start_dim, 2), opts.max_dim);
        for (;;) {
            schedule.push_back(d);
            if (d >= opts.max_dim) break;
            d = std::min(2 * d, opts.max_dim);
        }
    }

    std::vector<ConvergenceStep> history;
    std::optional<SectorPair> current;
    bool converged = false;
    for (int d : schedule) {
        SectorPair pair = solve_sectors(params, d);
        const double e = lowest(pair);
        std::optional<double> delta;
        if (!history.empty()) delta = e - history.back().energy;
        history.push_back({d, e, delta});
        current = std::move(pair);
        if (delta && std::abs(*delta) < opts.tol) {
            converged = true;
            if (!opts.fixed_dim) break;
        }
    }
    if (opts.fixed_dim) converged = history.back().delta && std::abs(*history.back().delta) < opts.tol;

    const SectorPair& s = *current;
    const double gap = s.minus.energy - s.plus.energy;
    const bool degenerate = std::abs(gap) < opts.degeneracy_threshold;
    const ParitySector sector = (degenerate || gap >= 0.0) ? ParitySector::Plus : ParitySector::Minus;
    const Eigenpair& g = sector == ParitySector::Plus ? s.plus : s.minus;

    return GroundSolution{
        g.energy,
        embed_reduced_state(g.state, sector),
        g.state,
        sector,
        degenerate,
        gap,
        history.back().dim,
        converged,
        history.back().delta.value_or(0.0),
        std::move(history),
    };
}

} // namespace rabi
