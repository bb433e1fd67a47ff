// Null space, spectrum and relaxation of Liouvillians

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "spindiode/error.hpp"
#include "spindiode/fidelity.hpp"
#include "spindiode/liouville.hpp"

namespace spindiode {

struct SteadyStateResult {
    Operator rho_ss;                  // lab frame, unit trace, Hermitian
    double residual = 0.0;            // ||L vec(rho_ss)||_2
    int degeneracy = 0;               // eigenvalues with |nu| <= null_tol
    double null_tol = 0.0;
    std::vector<cplx> spectrum;       // filled by the eigendecomposition route
    std::vector<Operator> null_states; // all null density matrices (trace-normalized when possible)
    std::vector<bool> traceless;      // per null state: trace vanished, kept Frobenius-normalized
    double hermitization_change = 0.0;
    double condition_estimate = 0.0;  // linear-solve route only
    std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<Eigen::Index> diagonal_indices(Eigen::Index dim) {
    std::vector<Eigen::Index> out(dim);
    for (Eigen::Index i = 0; i < dim; ++i) out[i] = vec_index(i, i, dim);
    return out;
}

inline double frobenius(const SuperMatrix& m) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < m.outerSize(); ++c)
        for (SuperMatrix::InnerIterator it(m, c); it; ++it) s += std::norm(it.value());
    return std::sqrt(s);
}

// Hermitian, unit trace, eigenvalues in [-1e-10, 0) clipped. Throws on clearly negative states.
inline Operator repair_density(const Operator& raw, std::vector<std::string>& warnings) {
    Operator rho = 0.5 * (raw + raw.adjoint());
    rho /= rho.trace().real();
    Eigen::SelfAdjointEigenSolver<Operator> es(rho);
    if (es.info() != Eigen::Success) throw NumericalError("steady state: Hermitian eigensolver failed");
    Eigen::VectorXd ev = es.eigenvalues();
    const double lo = ev.minCoeff();
    if (lo < -1e-8) throw NumericalError("steady state is not positive: eigenvalue " + std::to_string(lo));
    if (lo < -1e-10) {
        warnings.push_back("steady state has eigenvalue " + std::to_string(lo) + " below -1e-10; left unclipped");
        return rho;
    }
    if (lo >= 0.0) return rho;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) < 0.0) ev(i) = 0.0;
    Operator fixed = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    return fixed / fixed.trace().real();
}

} // namespace detail

/// All eigenvalues, sorted by real part (descending), then imaginary part.
inline std::vector<cplx> spectrum(const Liouvillian& l) {
    const BlockPartition part = partition_blocks(l.matrix);
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(l.dim()));
    for (const auto& idx : part.blocks) {
        if (idx.size() == 1) {
            out.push_back(l.matrix.coeff(idx[0], idx[0]));
            continue;
        }
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(extract_block(l.matrix, idx), false);
        if (es.info() != Eigen::Success) throw NumericalError("spectrum: eigensolver failed");
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
    }
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return out;
}

/// Steady states from a full eigendecomposition (block by block).
/// null_tol <= 0 selects 1e-9 * max|nu|.
inline SteadyStateResult steady_states(const Liouvillian& l, double null_tol = 0.0) {
    const Eigen::Index d = l.hilbert_dim;
    const BlockPartition part = partition_blocks(l.matrix);
    std::vector<char> has_diag(part.blocks.size(), 0);
    for (Eigen::Index i : detail::diagonal_indices(d)) has_diag[part.block_of[i]] = 1;

    struct Decomp {
        Eigen::VectorXcd values;
        std::optional<Eigen::MatrixXcd> vectors;
    };
    std::vector<Decomp> dec(part.blocks.size());
    SteadyStateResult res;
    double max_abs = 0.0;
    for (std::size_t b = 0; b < part.blocks.size(); ++b) {
        const Eigen::MatrixXcd blk = extract_block(l.matrix, part.blocks[b]);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(blk, has_diag[b] != 0);
        if (es.info() != Eigen::Success) throw NumericalError("steady_states: eigensolver failed");
        dec[b].values = es.eigenvalues();
        if (has_diag[b]) dec[b].vectors = es.eigenvectors();
        for (Eigen::Index i = 0; i < dec[b].values.size(); ++i) {
            res.spectrum.push_back(dec[b].values(i));
            max_abs = std::max(max_abs, std::abs(dec[b].values(i)));
        }
    }
    std::sort(res.spectrum.begin(), res.spectrum.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    res.null_tol = null_tol > 0.0 ? null_tol : 1e-9 * max_abs;

    std::optional<Operator> first;
    for (std::size_t b = 0; b < part.blocks.size(); ++b) {
        std::vector<Eigen::Index> nulls;
        for (Eigen::Index i = 0; i < dec[b].values.size(); ++i)
            if (std::abs(dec[b].values(i)) <= res.null_tol) nulls.push_back(i);
        if (nulls.empty()) continue;
        if (!dec[b].vectors) {
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(extract_block(l.matrix, part.blocks[b]), true);
            dec[b].vectors = es.eigenvectors();
        }
        const auto& idx = part.blocks[b];
        if (nulls.size() > 1) {
            Eigen::MatrixXcd basis(idx.size(), static_cast<Eigen::Index>(nulls.size()));
            for (std::size_t k = 0; k < nulls.size(); ++k)
                basis.col(static_cast<Eigen::Index>(k)) = dec[b].vectors->col(nulls[k]).normalized();
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(basis);
            if (svd.singularValues().minCoeff() < 1e-6)
                res.warnings.push_back("null eigenvectors nearly parallel; Liouvillian may be defective");
        }
        for (Eigen::Index k : nulls) {
            res.degeneracy += 1;
            SuperVector full = SuperVector::Zero(l.dim());
            for (std::size_t i = 0; i < idx.size(); ++i) full(idx[i]) = (*dec[b].vectors)(static_cast<Eigen::Index>(i), k);
            Operator m = unvectorize(full);
            const cplx tr = m.trace();
            if (std::abs(tr) <= 1e-12 * m.norm()) {
                Operator herm = 0.5 * (m + m.adjoint());
                res.null_states.push_back(herm.norm() > 0.0 ? Operator(herm / herm.norm()) : herm);
                res.traceless.push_back(true);
                continue;
            }
            m /= tr;
            const Operator herm = 0.5 * (m + m.adjoint());
            res.hermitization_change = std::max(res.hermitization_change, (herm - m).cwiseAbs().maxCoeff());
            res.null_states.push_back(l.from_frame(herm));
            res.traceless.push_back(false);
            if (!first) first = herm;
        }
    }
    if (!first) throw NumericalError("steady_states: no null vector with non-zero trace");
    // A degenerate null space has no preferred basis; its elements need not be positive.
    Operator rho_frame = *first;
    if (res.degeneracy == 1) {
        rho_frame = detail::repair_density(*first, res.warnings);
    } else {
        res.warnings.push_back("steady state is not unique (" + std::to_string(res.degeneracy) +
                               " null eigenvalues); rho_ss is one element of the null space");
    }
    res.residual = (l.matrix * vectorize(rho_frame)).norm();
    res.rho_ss = l.from_frame(rho_frame);
    return res;
}

struct SolveOptions {
    Eigen::Index dense_limit = 256; // blocks up to this size use dense LU
    int condition_iterations = 3;   // inverse-iteration steps of the singularity check
    double max_condition = 1e16;    // above this the null space is treated as degenerate
};

/// Unique steady state via one linear solve: a row of the trace-carrying block is
/// replaced by the trace constraint. Throws DegenerateSteadyState when the null space
/// is not one-dimensional.
inline SteadyStateResult solve_steady_state(const Liouvillian& l, const SolveOptions& opts = {}) {
    const Eigen::Index d = l.hilbert_dim;
    const BlockPartition part = partition_blocks(l.matrix);
    const auto diag = detail::diagonal_indices(d);
    const Eigen::Index target = part.block_of[diag.front()];
    for (Eigen::Index i : diag) {
        if (part.block_of[i] != target)
            throw DegenerateSteadyState("populations split into disconnected blocks; steady state is not unique");
    }
    const auto& idx = part.blocks[target];
    const Eigen::Index n = static_cast<Eigen::Index>(idx.size());
    std::vector<Eigen::Index> local(l.dim(), -1);
    for (Eigen::Index k = 0; k < n; ++k) local[idx[k]] = k;
    const Eigen::Index pivot_row = local[diag.front()];

    SuperVector rhs = SuperVector::Zero(n);
    rhs(pivot_row) = 1.0;
    std::function<SuperVector(const SuperVector&)> solve;
    double a_norm = 0.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> dense_lu;
    Eigen::SparseLU<SuperMatrix, Eigen::COLAMDOrdering<Eigen::Index>> sparse_lu;
    if (n <= opts.dense_limit) {
        Eigen::MatrixXcd blk = extract_block(l.matrix, idx);
        blk.row(pivot_row).setZero();
        for (Eigen::Index i : diag) blk(pivot_row, local[i]) = 1.0;
        a_norm = blk.norm();
        dense_lu.compute(blk);
        solve = [&](const SuperVector& b) -> SuperVector { return dense_lu.solve(b); };
    } else {
        SuperMatrix blk = extract_sparse_block(l.matrix, idx);
        std::vector<Eigen::Triplet<cplx, Eigen::Index>> trips;
        trips.reserve(static_cast<std::size_t>(blk.nonZeros()) + diag.size());
        for (Eigen::Index c = 0; c < blk.outerSize(); ++c)
            for (SuperMatrix::InnerIterator it(blk, c); it; ++it)
                if (it.row() != pivot_row) trips.emplace_back(it.row(), c, it.value());
        for (Eigen::Index i : diag) trips.emplace_back(pivot_row, local[i], 1.0);
        SuperMatrix a(n, n);
        a.setFromTriplets(trips.begin(), trips.end());
        a.makeCompressed();
        a_norm = a.norm();
        sparse_lu.compute(a);
        if (sparse_lu.info() != Eigen::Success)
            throw DegenerateSteadyState("steady-state system is singular: " + sparse_lu.lastErrorMessage());
        solve = [&](const SuperVector& b) -> SuperVector { return sparse_lu.solve(b); };
    }
    const SuperVector x = solve(rhs);
    if (!x.allFinite() || x.norm() > 1e3) throw DegenerateSteadyState("steady-state system is singular; null space is degenerate");

    // A second null vector leaves the bordered system singular, yet the solve above can still
    // return a plausible state. Inverse iteration on the same factorization estimates ||A^-1||.
    double inv_norm = 0.0;
    {
        std::mt19937 rng(12345);
        std::normal_distribution<double> g;
        SuperVector v(n);
        for (Eigen::Index k = 0; k < n; ++k) v(k) = cplx(g(rng), g(rng));
        v.normalize();
        for (int it = 0; it < opts.condition_iterations; ++it) {
            const SuperVector w = solve(v);
            inv_norm = w.norm();
            if (!std::isfinite(inv_norm) || inv_norm == 0.0) break;
            v = w / inv_norm;
        }
    }
    const double cond = std::isfinite(inv_norm) ? inv_norm * a_norm : std::numeric_limits<double>::infinity();
    if (!(cond < opts.max_condition)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", cond);
        throw DegenerateSteadyState(std::string("steady-state system is numerically singular (condition estimate ") + buf +
                                    "); null space is degenerate");
    }

    SuperVector full = SuperVector::Zero(l.dim());
    for (Eigen::Index k = 0; k < n; ++k) full(idx[k]) = x(k);
    SteadyStateResult res;
    const Operator raw = unvectorize(full);
    const Operator herm = 0.5 * (raw + raw.adjoint());
    res.hermitization_change = (herm - raw).cwiseAbs().maxCoeff();
    const Operator rho_frame = detail::repair_density(raw, res.warnings);
    res.residual = (l.matrix * vectorize(rho_frame)).norm();
    if (res.residual > 1e-8 * std::max(1.0, detail::frobenius(l.matrix)))
        throw NumericalError("steady-state solve did not converge, residual " + std::to_string(res.residual));
    res.degeneracy = 1;
    res.condition_estimate = cond;
    res.rho_ss = l.from_frame(rho_frame);
    res.null_states.push_back(res.rho_ss);
    res.traceless.push_back(false);
    return res;
}

/// Uhlmann fidelity between rho(t) and rho_ss along a trajectory started from `initial`.
inline std::vector<double> convergence_fidelity(const Liouvillian& l, const Operator& initial, const Operator& rho_ss,
                                                std::span<const double> times) {
    const auto traj = propagate(l, initial, times);
    std::vector<double> f;
    f.reserve(traj.size());
    for (const Operator& rho : traj) f.push_back(fidelity_mixed(rho, rho_ss));
    return f;
}

inline std::vector<double> convergence_fidelity(const Liouvillian& l, const StateVector& initial, const Operator& rho_ss,
                                                std::span<const double> times) {
    return convergence_fidelity(l, projector(initial), rho_ss, times);
}

} // namespace spindiode
