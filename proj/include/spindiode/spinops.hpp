// Pauli algebra, tensor embeddings and partial traces for spin-1/2 registers

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spindiode/error.hpp"

namespace spindiode {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// Basis convention used everywhere: |down> = (1,0), |up> = (0,1), so that
// sigma_z|down> = -|down>. Site 1 is the leftmost (most significant) factor.

namespace pauli {

inline Operator identity() { return Operator::Identity(2, 2); }

inline Operator x() {
    Operator m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Operator y() {
    Operator m(2, 2);
    m << cplx(0.0, 0.0), cplx(0.0, 1.0), cplx(0.0, -1.0), cplx(0.0, 0.0);
    return m;
}

inline Operator z() {
    Operator m(2, 2);
    m << -1.0, 0.0, 0.0, 1.0;
    return m;
}

/// Raising operator |up><down| = (sigma_x + i sigma_y) / 2.
inline Operator plus() {
    Operator m = Operator::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

/// Lowering operator |down><up|.
inline Operator minus() {
    Operator m = Operator::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

} // namespace pauli

inline bool is_power_of_two(Eigen::Index n) { return n >= 1 && (n & (n - 1)) == 0; }

/// Number of spins for a Hilbert-space dimension 2^n; throws if dim is not a power of two.
inline int sites_for_dim(Eigen::Index dim) {
    if (dim < 2 || !is_power_of_two(dim)) {
        throw DimensionError("dimension " + std::to_string(dim) + " is not 2^n with n >= 1");
    }
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    return n;
}

inline Eigen::Index dim_for_sites(int n_sites) { return Eigen::Index{1} << n_sites; }

inline double hermiticity_error(const Operator& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Operator& m, double tol = 1e-12) {
    return m.rows() == m.cols() && hermiticity_error(m) < tol;
}

inline Operator kron(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline StateVector kron(const StateVector& a, const StateVector& b) {
    StateVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

inline void check_site(int n_sites, int site) {
    if (n_sites < 1) throw DimensionError("n_sites must be positive");
    if (site < 1 || site > n_sites) {
        throw DimensionError("site " + std::to_string(site) + " outside 1.." + std::to_string(n_sites));
    }
}

/// Bit mask selecting `site` inside a basis-state index of an n-site register.
inline Eigen::Index site_mask(int n_sites, int site) { return Eigen::Index{1} << (n_sites - site); }

/// I ⊗ ... ⊗ local ⊗ ... ⊗ I with `local` acting on `site`.
inline Operator site_operator(int n_sites, int site, const Operator& local) {
    check_site(n_sites, site);
    if (local.rows() != 2 || local.cols() != 2) throw DimensionError("local operator must be 2x2");
    const Eigen::Index dim = dim_for_sites(n_sites);
    const Eigen::Index mask = site_mask(n_sites, site);
    Operator out = Operator::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        const int in_bit = (col & mask) ? 1 : 0;
        for (int out_bit = 0; out_bit < 2; ++out_bit) {
            const cplx v = local(out_bit, in_bit);
            if (v == cplx(0.0)) continue;
            const Eigen::Index row = out_bit ? (col | mask) : (col & ~mask);
            out(row, col) += v;
        }
    }
    return out;
}

inline Operator sigma_x(int n, int site) { return site_operator(n, site, pauli::x()); }
inline Operator sigma_y(int n, int site) { return site_operator(n, site, pauli::y()); }
inline Operator sigma_z(int n, int site) { return site_operator(n, site, pauli::z()); }
inline Operator sigma_plus(int n, int site) { return site_operator(n, site, pauli::plus()); }
inline Operator sigma_minus(int n, int site) { return site_operator(n, site, pauli::minus()); }

inline void check_pair(int n_sites, int i, int j) {
    check_site(n_sites, i);
    check_site(n_sites, j);
    if (i == j) throw DimensionError("coupling needs two distinct sites, got " + std::to_string(i) + " twice");
}

/// XX exchange sigma_x^i sigma_x^j + sigma_y^i sigma_y^j.
inline Operator exchange_xx(int n_sites, int i, int j) {
    check_pair(n_sites, i, j);
    return sigma_x(n_sites, i) * sigma_x(n_sites, j) + sigma_y(n_sites, i) * sigma_y(n_sites, j);
}

/// Ising coupling sigma_z^i sigma_z^j.
inline Operator coupling_zz(int n_sites, int i, int j) {
    check_pair(n_sites, i, j);
    return sigma_z(n_sites, i) * sigma_z(n_sites, j);
}

inline Operator total_sigma_z(int n_sites) {
    const Eigen::Index dim = dim_for_sites(n_sites);
    Operator out = Operator::Zero(dim, dim);
    for (int s = 1; s <= n_sites; ++s) out += sigma_z(n_sites, s);
    return out;
}

/// Swap of the tensor factors at sites i and j.
inline Operator swap_sites(int n_sites, int i, int j) {
    check_pair(n_sites, i, j);
    const Eigen::Index dim = dim_for_sites(n_sites);
    const Eigen::Index mi = site_mask(n_sites, i);
    const Eigen::Index mj = site_mask(n_sites, j);
    Operator p = Operator::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        const bool bi = col & mi;
        const bool bj = col & mj;
        Eigen::Index row = col & ~(mi | mj);
        if (bi) row |= mj;
        if (bj) row |= mi;
        p(row, col) = 1.0;
    }
    return p;
}

// ---------------------------------------------------------------------------
// States

/// Product state from a string of 'u'/'d' (or '1'/'0'), site 1 first.
inline StateVector product_state(const std::string& spins) {
    if (spins.empty()) throw ConfigError("product_state: empty spin string");
    StateVector v = StateVector::Zero(dim_for_sites(static_cast<int>(spins.size())));
    Eigen::Index idx = 0;
    for (char c : spins) {
        idx <<= 1;
        switch (c) {
        case 'u': case 'U': case '1': idx |= 1; break;
        case 'd': case 'D': case '0': break;
        default: throw ConfigError(std::string("product_state: bad spin character '") + c + "'");
        }
    }
    v(idx) = 1.0;
    return v;
}

inline StateVector up() { return product_state("u"); }
inline StateVector down() { return product_state("d"); }

namespace bell {

inline StateVector psi_plus() { return (product_state("ud") + product_state("du")) / std::sqrt(2.0); }
inline StateVector psi_minus() { return (product_state("ud") - product_state("du")) / std::sqrt(2.0); }
inline StateVector phi_plus() { return (product_state("dd") + product_state("uu")) / std::sqrt(2.0); }
inline StateVector phi_minus() { return (product_state("dd") - product_state("uu")) / std::sqrt(2.0); }

} // namespace bell

inline StateVector kron_all(std::span<const StateVector> parts) {
    if (parts.empty()) throw DimensionError("kron_all needs at least one factor");
    StateVector out = parts.front();
    for (std::size_t k = 1; k < parts.size(); ++k) out = kron(out, parts[k]);
    return out;
}

inline StateVector kron_all(std::initializer_list<StateVector> parts) {
    return kron_all(std::span<const StateVector>(parts.begin(), parts.size()));
}

inline Operator projector(const StateVector& psi) { return psi * psi.adjoint(); }

inline bool is_normalized(const StateVector& psi, double tol = 1e-12) {
    return std::abs(psi.norm() - 1.0) < tol;
}

// ---------------------------------------------------------------------------
// Partial trace

/// Reduced operator on the strictly increasing, 1-based site list `keep`.
inline Operator partial_trace(const Operator& rho, std::span<const int> keep) {
    if (rho.rows() != rho.cols()) throw DimensionError("partial_trace needs a square operator");
    const int n = sites_for_dim(rho.rows());
    if (keep.empty()) throw DimensionError("partial_trace: keep list is empty");
    for (std::size_t k = 0; k < keep.size(); ++k) {
        if (keep[k] < 1 || keep[k] > n) throw DimensionError("partial_trace: site out of range");
        if (k > 0 && keep[k] <= keep[k - 1]) throw DimensionError("partial_trace: keep list must be strictly increasing");
    }
    const int m = static_cast<int>(keep.size());
    Eigen::Index kept_mask = 0;
    for (int s : keep) kept_mask |= site_mask(n, s);

    auto reduced_index = [&](Eigen::Index full) {
        Eigen::Index r = 0;
        for (int s : keep) r = (r << 1) | ((full & site_mask(n, s)) ? 1 : 0);
        return r;
    };

    const Eigen::Index dim = rho.rows();
    Operator out = Operator::Zero(dim_for_sites(m), dim_for_sites(m));
    for (Eigen::Index col = 0; col < dim; ++col) {
        const Eigen::Index env = col & ~kept_mask;
        const Eigen::Index rc = reduced_index(col);
        for (Eigen::Index row = 0; row < dim; ++row) {
            if ((row & ~kept_mask) != env) continue;
            out(reduced_index(row), rc) += rho(row, col);
        }
    }
    return out;
}

inline Operator partial_trace(const Operator& rho, std::initializer_list<int> keep) {
    return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

inline double expectation(const Operator& rho, const Operator& obs) {
    return (rho * obs).trace().real();
}

} // namespace spindiode
