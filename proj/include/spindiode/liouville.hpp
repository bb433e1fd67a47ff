// Vectorized Lindblad superoperators, block structure and time propagation

#pragma once

#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include "spindiode/error.hpp"
#include "spindiode/fermions.hpp"
#include "spindiode/spinops.hpp"

namespace spindiode {

using SuperMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor, Eigen::Index>;
using SuperVector = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Column stacking

inline SuperVector vectorize(const Operator& rho) {
    if (rho.rows() != rho.cols()) throw DimensionError("vectorize needs a square matrix");
    return Eigen::Map<const SuperVector>(rho.data(), rho.size());
}

inline Operator unvectorize(const SuperVector& v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size() || d == 0) throw DimensionError("unvectorize: length " + std::to_string(v.size()) + " is not a square");
    return Eigen::Map<const Operator>(v.data(), d, d);
}

/// Index of rho(row, col) inside vec(rho).
inline Eigen::Index vec_index(Eigen::Index row, Eigen::Index col, Eigen::Index dim) { return row + dim * col; }

// ---------------------------------------------------------------------------
// Dissipator descriptions

enum class DissipatorKind { SpinLadder, Decay_T1, Dephase_T2, FermionLadder };

struct DissipatorSpec {
    int site = 1;
    double lambda = 0.0; // occupation parameter of ladder baths
    double gamma = 1.0;  // channel rate in units of J
    DissipatorKind kind = DissipatorKind::SpinLadder;
};

inline void validate(const DissipatorSpec& d) {
    if (!(d.lambda >= 0.0 && d.lambda <= 1.0)) throw ConfigError("dissipator.lambda: must lie in [0, 1]");
    if (!(d.gamma >= 0.0) || !std::isfinite(d.gamma)) throw ConfigError("dissipator.gamma: must be finite and >= 0");
}

/// Decay at rate 1/T and dephasing at rate 1/(4T) on each listed site, so T1 = T2 = T.
inline std::vector<DissipatorSpec> decoherence_channels(std::span<const int> sites, double coherence_time) {
    if (!(coherence_time > 0.0)) throw ConfigError("coherence_time: must be positive");
    std::vector<DissipatorSpec> out;
    for (int s : sites) {
        out.push_back({s, 0.0, 1.0 / coherence_time, DissipatorKind::Decay_T1});
        out.push_back({s, 0.0, 1.0 / (4.0 * coherence_time), DissipatorKind::Dephase_T2});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Liouvillian

/// Superoperator acting on column-stacked density matrices. When `frame` is set the
/// vectors live in the basis given by its columns, i.e. they represent V^dag rho V.
struct Liouvillian {
    Eigen::Index hilbert_dim = 0;
    SuperMatrix matrix;
    std::optional<Operator> frame;
    std::vector<DissipatorSpec> dissipators;

    Eigen::Index dim() const { return matrix.rows(); }

    Operator to_frame(const Operator& rho) const { return frame ? Operator(frame->adjoint() * rho * *frame) : rho; }
    Operator from_frame(const Operator& rho) const { return frame ? Operator(*frame * rho * frame->adjoint()) : rho; }

    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix); }

    /// L[rho] for a lab-frame density matrix.
    Operator apply(const Operator& rho) const {
        SuperVector v = matrix * vectorize(to_frame(rho));
        return from_frame(unvectorize(v));
    }

    Liouvillian& operator+=(const Liouvillian& other) {
        if (other.hilbert_dim != hilbert_dim) throw DimensionError("Liouvillian dimension mismatch");
        if (frame.has_value() != other.frame.has_value() ||
            (frame && (*frame - *other.frame).cwiseAbs().maxCoeff() > 0.0)) {
            throw DimensionError("Liouvillians expressed in different frames");
        }
        matrix += other.matrix;
        dissipators.insert(dissipators.end(), other.dissipators.begin(), other.dissipators.end());
        return *this;
    }
};

namespace detail {

struct Entry {
    Eigen::Index row;
    Eigen::Index col;
    cplx value;
};

inline std::vector<Entry> nonzeros(const Operator& m) {
    std::vector<Entry> out;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (m(r, c) != cplx(0.0)) out.push_back({r, c, m(r, c)});
    return out;
}

inline std::vector<Entry> identity_entries(Eigen::Index dim) {
    std::vector<Entry> out;
    out.reserve(dim);
    for (Eigen::Index i = 0; i < dim; ++i) out.push_back({i, i, 1.0});
    return out;
}

// Triplets of coeff * (C^T ⊗ A), i.e. of rho -> coeff * A rho C.
inline void add_sandwich(std::vector<Eigen::Triplet<cplx, Eigen::Index>>& trips, Eigen::Index dim,
                         const std::vector<Entry>& a, const std::vector<Entry>& c, cplx coeff) {
    for (const Entry& ce : c) {
        // C(d, b): output column b, input column d
        for (const Entry& ae : a) {
            trips.emplace_back(vec_index(ae.row, ce.col, dim), vec_index(ae.col, ce.row, dim),
                               coeff * ae.value * ce.value);
        }
    }
}

inline SuperMatrix from_triplets(Eigen::Index dim, const std::vector<Eigen::Triplet<cplx, Eigen::Index>>& trips) {
    SuperMatrix m(dim * dim, dim * dim);
    m.setFromTriplets(trips.begin(), trips.end());
    m.prune(cplx(0.0), 0.0);
    return m;
}

} // namespace detail

/// Superoperator of rho -> A rho C, equal to (C^T ⊗ A) on vec(rho).
inline SuperMatrix sandwich_superop(const Operator& a, const Operator& c) {
    if (a.rows() != a.cols() || c.rows() != c.cols() || a.rows() != c.rows())
        throw DimensionError("sandwich_superop: operators must be square and of equal size");
    std::vector<Eigen::Triplet<cplx, Eigen::Index>> trips;
    detail::add_sandwich(trips, a.rows(), detail::nonzeros(a), detail::nonzeros(c), 1.0);
    return detail::from_triplets(a.rows(), trips);
}

/// -i[H, .] as a superoperator.
inline SuperMatrix hamiltonian_superop(const Operator& h) {
    if (h.rows() != h.cols()) throw DimensionError("Hamiltonian must be square");
    const Eigen::Index dim = h.rows();
    std::vector<Eigen::Triplet<cplx, Eigen::Index>> trips;
    const auto hz = detail::nonzeros(h);
    const auto id = detail::identity_entries(dim);
    detail::add_sandwich(trips, dim, hz, id, cplx(0.0, -1.0));
    detail::add_sandwich(trips, dim, id, hz, cplx(0.0, 1.0));
    return detail::from_triplets(dim, trips);
}

/// rate * (L rho L^dag - {L^dag L, rho}/2).
inline SuperMatrix jump_superop(const Operator& jump, double rate) {
    if (jump.rows() != jump.cols()) throw DimensionError("jump operator must be square");
    const Eigen::Index dim = jump.rows();
    std::vector<Eigen::Triplet<cplx, Eigen::Index>> trips;
    const Operator ldl = jump.adjoint() * jump;
    const auto id = detail::identity_entries(dim);
    detail::add_sandwich(trips, dim, detail::nonzeros(jump), detail::nonzeros(jump.adjoint()), rate);
    detail::add_sandwich(trips, dim, detail::nonzeros(ldl), id, -0.5 * rate);
    detail::add_sandwich(trips, dim, id, detail::nonzeros(ldl), -0.5 * rate);
    return detail::from_triplets(dim, trips);
}

inline SuperMatrix local_dissipator_superop(const DissipatorSpec& spec, int n_sites) {
    validate(spec);
    check_site(n_sites, spec.site);
    const double g = spec.gamma;
    switch (spec.kind) {
    case DissipatorKind::SpinLadder: {
        const Operator sp = sigma_plus(n_sites, spec.site);
        const Operator sm = sigma_minus(n_sites, spec.site);
        SuperMatrix m = jump_superop(sp, g * spec.lambda);
        m += jump_superop(sm, g * (1.0 - spec.lambda));
        return m;
    }
    case DissipatorKind::Decay_T1: return jump_superop(sigma_minus(n_sites, spec.site), g);
    case DissipatorKind::Dephase_T2: return jump_superop(sigma_z(n_sites, spec.site), g);
    case DissipatorKind::FermionLadder: {
        const FermionOps ops = jw_fermions(n_sites);
        const Operator& a = ops.annihilator(spec.site);
        SuperMatrix m = jump_superop(a.adjoint(), g * spec.lambda);
        m += jump_superop(a, g * (1.0 - spec.lambda));
        return m;
    }
    }
    throw ConfigError("dissipator.kind: unknown kind");
}

inline Liouvillian assemble_liouvillian(const Operator& h, std::span<const DissipatorSpec> dissipators) {
    const int n = sites_for_dim(h.rows());
    if (h.rows() != h.cols()) throw DimensionError("Hamiltonian must be square");
    Liouvillian l;
    l.hilbert_dim = h.rows();
    l.matrix = hamiltonian_superop(h);
    for (const DissipatorSpec& d : dissipators) {
        l.matrix += local_dissipator_superop(d, n);
        l.dissipators.push_back(d);
    }
    return l;
}

inline Liouvillian assemble_liouvillian(const Operator& h, std::initializer_list<DissipatorSpec> dissipators) {
    return assemble_liouvillian(h, std::span<const DissipatorSpec>(dissipators.begin(), dissipators.size()));
}

/// max over columns of |sum_i L[(i,i), col]|: zero for a trace-preserving generator.
inline double trace_preservation_error(const Liouvillian& l) {
    const Eigen::Index d = l.hilbert_dim;
    double worst = 0.0;
    for (Eigen::Index col = 0; col < l.matrix.outerSize(); ++col) {
        cplx s = 0.0;
        for (SuperMatrix::InnerIterator it(l.matrix, col); it; ++it)
            if (it.row() % (d + 1) == 0) s += it.value();
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Block structure
//
// Symmetries (magnetization, frequency sectors of the secular equation) make the
// Liouvillian block diagonal after a permutation. The blocks are the connected
// components of its sparsity graph; no symmetry has to be declared up front.

struct BlockPartition {
    std::vector<std::vector<Eigen::Index>> blocks; // sorted vec indices per block
    std::vector<Eigen::Index> block_of;            // vec index -> block id
};

inline BlockPartition partition_blocks(const SuperMatrix& m) {
    const Eigen::Index n = m.rows();
    std::vector<Eigen::Index> parent(n);
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (Eigen::Index col = 0; col < m.outerSize(); ++col) {
        for (SuperMatrix::InnerIterator it(m, col); it; ++it) {
            const Eigen::Index a = find(it.row());
            const Eigen::Index b = find(col);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }
    BlockPartition p;
    p.block_of.assign(n, -1);
    std::vector<Eigen::Index> root_to_block(n, -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index r = find(i);
        if (root_to_block[r] < 0) {
            root_to_block[r] = static_cast<Eigen::Index>(p.blocks.size());
            p.blocks.emplace_back();
        }
        p.block_of[i] = root_to_block[r];
        p.blocks[root_to_block[r]].push_back(i);
    }
    return p;
}

inline Eigen::MatrixXcd extract_block(const SuperMatrix& m, std::span<const Eigen::Index> idx) {
    const Eigen::Index n = static_cast<Eigen::Index>(idx.size());
    std::vector<Eigen::Index> local(m.rows(), -1);
    for (Eigen::Index k = 0; k < n; ++k) local[idx[k]] = k;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (SuperMatrix::InnerIterator it(m, idx[k]); it; ++it) {
            const Eigen::Index r = local[it.row()];
            if (r < 0) throw NumericalError("extract_block: index set is not closed under the matrix");
            out(r, k) = it.value();
        }
    }
    return out;
}

inline SuperMatrix extract_sparse_block(const SuperMatrix& m, std::span<const Eigen::Index> idx) {
    const Eigen::Index n = static_cast<Eigen::Index>(idx.size());
    std::vector<Eigen::Index> local(m.rows(), -1);
    for (Eigen::Index k = 0; k < n; ++k) local[idx[k]] = k;
    std::vector<Eigen::Triplet<cplx, Eigen::Index>> trips;
    for (Eigen::Index k = 0; k < n; ++k) {
        for (SuperMatrix::InnerIterator it(m, idx[k]); it; ++it) {
            const Eigen::Index r = local[it.row()];
            if (r < 0) throw NumericalError("extract_sparse_block: index set is not closed under the matrix");
            trips.emplace_back(r, k, it.value());
        }
    }
    SuperMatrix out(n, n);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

// ---------------------------------------------------------------------------
// Propagation

struct PropagateOptions {
    double reuse_tolerance = 1e-9; // relative spacing difference below which a propagator is reused
};

/// rho_j(t_k) = exp(L t_k) rho_j(0) for several initial states on one sorted grid of non-negative
/// times. One matrix exponential per distinct spacing and touched block, shared by all states.
inline std::vector<std::vector<Operator>> propagate_many(const Liouvillian& l, std::span<const Operator> initial,
                                                         std::span<const double> times, const PropagateOptions& opts = {}) {
    for (const Operator& rho0 : initial)
        if (rho0.rows() != l.hilbert_dim || rho0.cols() != l.hilbert_dim) throw DimensionError("propagate: state dimension mismatch");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || times[k] < 0.0) throw ConfigError("times: must be finite and non-negative");
        if (k > 0 && times[k] < times[k - 1]) throw ConfigError("times: grid must be sorted");
    }
    const BlockPartition part = partition_blocks(l.matrix);
    std::vector<SuperVector> vs;
    for (const Operator& rho0 : initial) vs.push_back(vectorize(l.to_frame(rho0)));

    std::vector<std::size_t> touched;
    for (std::size_t b = 0; b < part.blocks.size(); ++b) {
        bool hit = false;
        for (const SuperVector& v : vs)
            for (Eigen::Index i : part.blocks[b])
                if (v(i) != cplx(0.0)) {
                    hit = true;
                    break;
                }
        if (hit) touched.push_back(b);
    }
    std::vector<Eigen::MatrixXcd> generators;
    generators.reserve(touched.size());
    for (std::size_t b : touched) generators.push_back(extract_block(l.matrix, part.blocks[b]));

    std::vector<Eigen::MatrixXcd> props(touched.size());
    double cached_dt = -1.0;
    std::vector<std::vector<Operator>> out(initial.size());
    for (auto& o : out) o.reserve(times.size());
    double t_prev = 0.0;
    for (double t : times) {
        const double dt = t - t_prev;
        if (dt > 0.0) {
            if (cached_dt < 0.0 || std::abs(dt - cached_dt) > opts.reuse_tolerance * std::max(1.0, std::abs(dt))) {
                for (std::size_t k = 0; k < touched.size(); ++k) {
                    Eigen::MatrixXcd scaled = generators[k] * cplx(dt);
                    props[k] = scaled.exp();
                }
                cached_dt = dt;
            }
            for (SuperVector& v : vs) {
                for (std::size_t k = 0; k < touched.size(); ++k) {
                    const auto& idx = part.blocks[touched[k]];
                    SuperVector local(static_cast<Eigen::Index>(idx.size()));
                    for (std::size_t i = 0; i < idx.size(); ++i) local(i) = v(idx[i]);
                    SuperVector next = props[k] * local;
                    for (std::size_t i = 0; i < idx.size(); ++i) v(idx[i]) = next(i);
                }
            }
        }
        for (std::size_t j = 0; j < vs.size(); ++j) {
            if (!vs[j].allFinite()) throw NumericalError("propagate: non-finite state at t = " + std::to_string(t));
            out[j].push_back(l.from_frame(unvectorize(vs[j])));
        }
        t_prev = t;
    }
    return out;
}

inline std::vector<Operator> propagate(const Liouvillian& l, const Operator& rho0, std::span<const double> times,
                                       const PropagateOptions& opts = {}) {
    return std::move(propagate_many(l, std::span<const Operator>(&rho0, 1), times, opts).front());
}

inline std::vector<double> uniform_times(double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw ConfigError("time grid: need dt > 0 and t_end >= 0");
    const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
    std::vector<double> ts(n + 1);
    for (std::size_t k = 0; k <= n; ++k) ts[k] = static_cast<double>(k) * dt;
    return ts;
}

} // namespace spindiode
