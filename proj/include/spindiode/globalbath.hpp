// Secular global master equation with ohmic thermal baths

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "spindiode/liouville.hpp"
#include "spindiode/models.hpp"
#include "spindiode/steadystate.hpp"

namespace spindiode {

struct ThermalBathSpec {
    int site = 1;
    double temperature = 1.0;   // k_B = 1, units of J
    double gamma = 1.0;         // ohmic prefactor, J(w) = gamma |w|
    double secular_cutoff = 0.0; // frequency pairs with |w - w'| <= cutoff are kept
    double degeneracy_tol = 0.0; // <= 0: 1e-9 * max|eps|
    bool include_zero_frequency = true;
};

inline void validate(const ThermalBathSpec& b) {
    if (!(b.temperature > 0.0) || !std::isfinite(b.temperature)) throw ConfigError("bath.temperature: must be positive");
    if (!(b.gamma >= 0.0) || !std::isfinite(b.gamma)) throw ConfigError("bath.gamma: must be >= 0");
    if (!(b.secular_cutoff >= 0.0)) throw ConfigError("bath.secular_cutoff: must be >= 0");
}

/// gamma|w|(1 + N) for emission (w > 0), gamma|w|N for absorption, gamma T at w = 0.
inline double bath_rate(double omega, double temperature, double gamma = 1.0) {
    if (!(temperature > 0.0)) throw ConfigError("bath_rate: temperature must be positive");
    if (omega == 0.0) return gamma * temperature;
    const double a = std::abs(omega);
    const double n = 1.0 / std::expm1(a / temperature);
    return omega > 0.0 ? gamma * a * (1.0 + n) : gamma * a * n;
}

// ---------------------------------------------------------------------------
// Spectral decomposition

struct EnergyBasis {
    Eigen::VectorXd energies; // grouped (degenerate levels share one value)
    Operator vectors;         // columns are eigenvectors
    std::vector<int> level;   // eigenvector -> level index
    double tol = 0.0;
};

/// Diagonalizes H block by block along its sparsity components, so eigenvectors never
/// mix symmetry sectors, then clusters eigenvalues within `tol`.
inline EnergyBasis energy_basis(const Operator& h, double tol = 0.0) {
    if (!is_hermitian(h, 1e-10)) throw ConfigError("energy_basis: Hamiltonian is not Hermitian");
    const Eigen::Index d = h.rows();
    std::vector<Eigen::Index> parent(d);
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index r = 0; r < d; ++r)
            if (h(r, c) != cplx(0.0)) {
                const auto a = find(r), b = find(c);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
    std::vector<std::vector<Eigen::Index>> comps(d);
    for (Eigen::Index i = 0; i < d; ++i) comps[find(i)].push_back(i);

    EnergyBasis eb;
    eb.energies.resize(d);
    eb.vectors = Operator::Zero(d, d);
    Eigen::Index col = 0;
    for (const auto& idx : comps) {
        if (idx.empty()) continue;
        const auto n = static_cast<Eigen::Index>(idx.size());
        Operator blk(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) blk(i, j) = h(idx[i], idx[j]);
        Eigen::SelfAdjointEigenSolver<Operator> es(blk);
        if (es.info() != Eigen::Success) throw NumericalError("energy_basis: eigensolver failed");
        for (Eigen::Index k = 0; k < n; ++k, ++col) {
            eb.energies(col) = es.eigenvalues()(k);
            for (Eigen::Index i = 0; i < n; ++i) eb.vectors(idx[i], col) = es.eigenvectors()(i, k);
        }
    }
    const double emax = eb.energies.cwiseAbs().maxCoeff();
    eb.tol = tol > 0.0 ? tol : 1e-9 * std::max(emax, 1e-300);

    std::vector<Eigen::Index> order(d);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return eb.energies(a) < eb.energies(b); });
    eb.level.assign(d, 0);
    int lvl = -1;
    std::size_t start = 0;
    auto close_group = [&](std::size_t end) {
        double mean = 0.0;
        for (std::size_t k = start; k < end; ++k) mean += eb.energies(order[k]);
        mean /= static_cast<double>(end - start);
        for (std::size_t k = start; k < end; ++k) eb.energies(order[k]) = mean;
    };
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k == 0 || eb.energies(order[k]) - eb.energies(order[k - 1]) > eb.tol) {
            if (k > 0) close_group(k);
            start = k;
            ++lvl;
        }
        eb.level[order[k]] = lvl;
    }
    close_group(order.size());
    return eb;
}

struct EigenOperator {
    double omega;
    Operator A; // lowers the energy by omega
};

/// A(w) = sum over level pairs with e' - e = w of P(e) X P(e'); frequencies clustered within tol.
inline std::vector<EigenOperator> eigen_operators(const Operator& h, const Operator& coupling, double tol = 0.0) {
    if (coupling.rows() != h.rows()) throw DimensionError("eigen_operators: dimension mismatch");
    const EnergyBasis eb = energy_basis(h, tol);
    const Operator s = eb.vectors.adjoint() * coupling * eb.vectors;
    const Eigen::Index d = h.rows();
    struct Entry {
        double w;
        Eigen::Index a, c;
    };
    std::vector<Entry> entries;
    for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index a = 0; a < d; ++a)
            if (std::abs(s(a, c)) > 1e-14) entries.push_back({eb.energies(c) - eb.energies(a), a, c});
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.w < y.w; });
    std::vector<EigenOperator> out;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (out.empty() || entries[k].w - out.back().omega > 2.0 * eb.tol) out.push_back({entries[k].w, Operator::Zero(d, d)});
        out.back().A(entries[k].a, entries[k].c) += s(entries[k].a, entries[k].c);
    }
    for (auto& e : out) e.A = eb.vectors * e.A * eb.vectors.adjoint();
    return out;
}

/// Distinct (after grouping) level spacings and Bohr frequencies that a secular window could merge.
struct GapAudit {
    double min_level_separation = std::numeric_limits<double>::infinity();
    double min_bohr_separation = std::numeric_limits<double>::infinity(); // over frequencies the bath couplings connect
    double grouping_tol = 0.0;
    // the dissipator pairs frequencies within cutoff + 2 * grouping_tol
    bool cutoff_matters(double cutoff) const {
        return std::min(min_level_separation, min_bohr_separation) <= cutoff + 2.0 * grouping_tol;
    }
};

inline GapAudit secular_gap_audit(const Operator& h, std::span<const int> bath_sites, double tol = 0.0) {
    const int n = sites_for_dim(h.rows());
    const EnergyBasis eb = energy_basis(h, tol);
    GapAudit g;
    g.grouping_tol = eb.tol;
    std::vector<double> levels(eb.energies.data(), eb.energies.data() + eb.energies.size());
    std::sort(levels.begin(), levels.end());
    for (std::size_t k = 1; k < levels.size(); ++k)
        if (levels[k] - levels[k - 1] > eb.tol) g.min_level_separation = std::min(g.min_level_separation, levels[k] - levels[k - 1]);
    for (int site : bath_sites) {
        const Operator s = eb.vectors.adjoint() * sigma_x(n, site) * eb.vectors;
        std::vector<double> w;
        for (Eigen::Index c = 0; c < s.cols(); ++c)
            for (Eigen::Index a = 0; a < s.rows(); ++a)
                if (std::abs(s(a, c)) > 1e-14) w.push_back(eb.energies(c) - eb.energies(a));
        std::sort(w.begin(), w.end());
        for (std::size_t k = 1; k < w.size(); ++k)
            if (w[k] - w[k - 1] > 2.0 * eb.tol) g.min_bohr_separation = std::min(g.min_bohr_separation, w[k] - w[k - 1]);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Dissipator in the energy eigenbasis

namespace detail {

// D[rho] = T[rho] - M rho - rho M^dag with
//   T_{ab,cd} = (g(E_c - E_a) + g(E_d - E_b))/2 S_ac conj(S_bd),  |w_ca - w_db| <= window
//   M_ac      = 1/2 sum_e g(E_c - E_e) conj(S_ea) S_ec,            |E_c - E_a|   <= window
inline SuperMatrix global_dissipator_frame(const EnergyBasis& eb, const Operator& s, const ThermalBathSpec& bath) {
    const Eigen::Index d = eb.energies.size();
    const double window = bath.secular_cutoff + 2.0 * eb.tol;
    auto rate = [&](double w) {
        if (std::abs(w) <= 2.0 * eb.tol) return bath.include_zero_frequency ? bath_rate(0.0, bath.temperature, bath.gamma) : 0.0;
        return bath_rate(w, bath.temperature, bath.gamma);
    };
    struct Nz {
        Eigen::Index a, c;
        cplx v;
        double w;
    };
    std::vector<Nz> nz;
    for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index a = 0; a < d; ++a)
            if (std::abs(s(a, c)) > 1e-14) nz.push_back({a, c, s(a, c), eb.energies(c) - eb.energies(a)});
    std::sort(nz.begin(), nz.end(), [](const Nz& x, const Nz& y) { return x.w < y.w; });

    std::vector<Eigen::Triplet<cplx, Eigen::Index>> trips;
    // T: pairs (a,c), (b,d) with matching frequency
    for (std::size_t i = 0; i < nz.size(); ++i) {
        const double gi = rate(nz[i].w);
        auto lo = std::lower_bound(nz.begin(), nz.end(), nz[i].w - window, [](const Nz& x, double w) { return x.w < w; });
        for (auto it = lo; it != nz.end() && it->w <= nz[i].w + window; ++it) {
            const double gj = rate(it->w);
            const cplx v = 0.5 * (gi + gj) * nz[i].v * std::conj(it->v);
            trips.emplace_back(vec_index(nz[i].a, it->a, d), vec_index(nz[i].c, it->c, d), v);
        }
    }
    // M
    Operator m = Operator::Zero(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index e = 0; e < d; ++e) {
            if (std::abs(s(e, c)) <= 1e-14) continue;
            const double g = 0.5 * rate(eb.energies(c) - eb.energies(e));
            if (g == 0.0) continue;
            for (Eigen::Index a = 0; a < d; ++a) {
                if (std::abs(s(e, a)) <= 1e-14) continue;
                if (std::abs(eb.energies(c) - eb.energies(a)) > window) continue;
                m(a, c) += g * std::conj(s(e, a)) * s(e, c);
            }
        }
    }
    const auto mz = nonzeros(m);
    const auto mdz = nonzeros(m.adjoint());
    const auto id = identity_entries(d);
    add_sandwich(trips, d, mz, id, -1.0);
    add_sandwich(trips, d, id, mdz, -1.0);
    return from_triplets(d, trips);
}

} // namespace detail

/// Global Liouvillian expressed in the energy eigenbasis (see Liouvillian::frame).
struct GlobalLiouvillian {
    Liouvillian total;
    std::vector<SuperMatrix> bath_terms; // one dissipator per bath, same frame
    EnergyBasis basis;
};

inline GlobalLiouvillian assemble_global_liouvillian(const Operator& h, std::span<const ThermalBathSpec> baths) {
    const int n = sites_for_dim(h.rows());
    const double tol = baths.empty() ? 0.0 : baths.front().degeneracy_tol;
    GlobalLiouvillian g;
    g.basis = energy_basis(h, tol);
    const Eigen::Index d = h.rows();
    std::vector<Eigen::Triplet<cplx, Eigen::Index>> trips;
    for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index a = 0; a < d; ++a) {
            const double w = g.basis.energies(a) - g.basis.energies(b);
            if (w != 0.0) trips.emplace_back(vec_index(a, b, d), vec_index(a, b, d), cplx(0.0, -w));
        }
    g.total.hilbert_dim = d;
    g.total.matrix = detail::from_triplets(d, trips);
    g.total.frame = g.basis.vectors;
    for (const ThermalBathSpec& bath : baths) {
        validate(bath);
        check_site(n, bath.site);
        const Operator s = g.basis.vectors.adjoint() * sigma_x(n, bath.site) * g.basis.vectors;
        g.bath_terms.push_back(detail::global_dissipator_frame(g.basis, s, bath));
        g.total.matrix += g.bath_terms.back();
    }
    return g;
}

inline GlobalLiouvillian assemble_global_liouvillian(const Operator& h, std::initializer_list<ThermalBathSpec> baths) {
    return assemble_global_liouvillian(h, std::span<const ThermalBathSpec>(baths.begin(), baths.size()));
}

/// The dissipator of one bath as a stand-alone Liouvillian term (lab-frame action via apply()).
inline Liouvillian global_dissipator(const Operator& h, const ThermalBathSpec& bath) {
    const GlobalLiouvillian g = assemble_global_liouvillian(h, {bath});
    Liouvillian l;
    l.hilbert_dim = g.total.hilbert_dim;
    l.frame = g.total.frame;
    l.matrix = g.bath_terms.front();
    return l;
}

/// Energy flowing from bath k into the system: tr(H D_k[rho]).
inline double heat_current(const GlobalLiouvillian& g, std::size_t bath, const Operator& rho) {
    const Operator r = g.total.to_frame(rho);
    const Operator dr = unvectorize(g.bath_terms.at(bath) * vectorize(r));
    double k = 0.0;
    for (Eigen::Index i = 0; i < dr.rows(); ++i) k += g.basis.energies(i) * dr(i, i).real();
    return k;
}

// ---------------------------------------------------------------------------
// Heat diode

struct HeatOptions {
    double T_C = 0.1;
    double T_H = 10.1;
    double gamma = 1.0;
    double secular_cutoff = 0.0;
    bool include_zero_frequency = true;
};

struct HeatBiasResult {
    Operator rho;
    double K = 0.0;         // from the left bath
    double K_balance = 0.0; // |tr(H D_left) + tr(H D_right)|
    double residual = 0.0;
};

struct HeatMetrics {
    double K_f = 0.0;
    double K_r = 0.0;
    double R_Q = 0.0;
    HeatBiasResult forward;
    HeatBiasResult reverse;
};

inline HeatBiasResult solve_heat_bias(const Operator& h, int left, int right, double t_left, double t_right, const HeatOptions& o) {
    const ThermalBathSpec bl{left, t_left, o.gamma, o.secular_cutoff, 0.0, o.include_zero_frequency};
    const ThermalBathSpec br{right, t_right, o.gamma, o.secular_cutoff, 0.0, o.include_zero_frequency};
    const GlobalLiouvillian g = assemble_global_liouvillian(h, {bl, br});
    const SteadyStateResult ss = solve_steady_state(g.total);
    HeatBiasResult out;
    out.rho = ss.rho_ss;
    out.residual = ss.residual;
    out.K = heat_current(g, 0, ss.rho_ss);
    out.K_balance = std::abs(out.K + heat_current(g, 1, ss.rho_ss));
    return out;
}

/// Forward bias: hot bath on the left end. R_Q = -K_f / K_r.
inline HeatMetrics evaluate_heat_diode(const ModelSpec& spec, const HeatOptions& o = {}) {
    if (spec.variant != Variant::Heat_HQ && spec.variant != Variant::LinearReference)
        throw ConfigError("model.variant: heat diode needs Heat_HQ or LinearReference");
    if (!(o.T_C > 0.0) || !(o.T_H > 0.0)) throw ConfigError("bath: temperatures must be positive");
    const Operator h = build_hamiltonian(spec);
    const auto [l, r] = bath_sites(spec);
    HeatMetrics m;
    m.forward = solve_heat_bias(h, l, r, o.T_H, o.T_C, o);
    m.reverse = solve_heat_bias(h, l, r, o.T_C, o.T_H, o);
    m.K_f = m.forward.K;
    m.K_r = m.reverse.K;
    m.R_Q = std::abs(m.K_r) < 1e-16 ? std::numeric_limits<double>::infinity() : -m.K_f / m.K_r;
    return m;
}

} // namespace spindiode
