// Currents, rectification, profiles, entanglement and the diode pipeline

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "spindiode/fidelity.hpp"
#include "spindiode/liouville.hpp"
#include "spindiode/models.hpp"
#include "spindiode/steadystate.hpp"

namespace spindiode {

/// j_ij = 2J (sx_i sy_j - sy_i sx_j); positive for flow from i to j.
inline Operator spin_current_op(int n_sites, int i, int j, double J = 1.0) {
    check_pair(n_sites, i, j);
    return 2.0 * J * (sigma_x(n_sites, i) * sigma_y(n_sites, j) - sigma_y(n_sites, i) * sigma_x(n_sites, j));
}

inline double rectification(double j_f, double j_r) {
    if (std::abs(j_r) < 1e-14) return std::numeric_limits<double>::infinity();
    return -j_f / j_r;
}

inline double contrast(double j_f, double j_r) {
    const double den = std::abs(j_f - j_r);
    if (den == 0.0) return 0.0;
    return std::abs(j_f + j_r) / den;
}

inline std::vector<double> magnetization_profile(const Operator& rho) {
    const int n = sites_for_dim(rho.rows());
    std::vector<double> m(n);
    for (int s = 1; s <= n; ++s) m[s - 1] = expectation(rho, sigma_z(n, s));
    return m;
}

/// Wootters concurrence of a two-spin density matrix.
inline double concurrence(const Operator& rho) {
    if (rho.rows() != 4 || rho.cols() != 4) throw DimensionError("concurrence needs a 4x4 density matrix");
    const Operator yy = kron(pauli::y(), pauli::y());
    const Operator r = rho * yy * rho.conjugate() * yy;
    Eigen::ComplexEigenSolver<Operator> es(r, false);
    std::vector<double> lam(4);
    for (int k = 0; k < 4; ++k) lam[k] = std::sqrt(std::max(es.eigenvalues()(k).real(), 0.0));
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

// ---------------------------------------------------------------------------
// Diode evaluation

struct BiasSetup {
    int hot_site = 1;
    int cold_site = 6;
    double lambda_hot = 0.5;
    double lambda_cold = 0.0;
    double gamma = 1.0;
};

inline void validate(const BiasSetup& b, const ModelSpec& spec) {
    const auto [l, r] = bath_sites(spec);
    if (b.hot_site == b.cold_site) throw ConfigError("bias: hot and cold site coincide");
    auto is_end = [&](int s) { return s == l || s == r; };
    if (!is_end(b.hot_site) || !is_end(b.cold_site)) throw ConfigError("bias: baths must sit at the chain ends");
    if (!(b.gamma >= 0.0)) throw ConfigError("bath.gamma: must be >= 0");
}

inline BiasSetup forward_bias(const ModelSpec& spec, double gamma = 1.0, double lambda_hot = 0.5, double lambda_cold = 0.0) {
    const auto [l, r] = bath_sites(spec);
    return {l, r, lambda_hot, lambda_cold, gamma};
}

inline BiasSetup reverse_bias(const ModelSpec& spec, double gamma = 1.0, double lambda_hot = 0.5, double lambda_cold = 0.0) {
    const auto [l, r] = bath_sites(spec);
    return {r, l, lambda_hot, lambda_cold, gamma};
}

struct DiodeOptions {
    double gamma = 1.0;
    double lambda_hot = 0.5;
    double lambda_cold = 0.0;
    std::optional<double> coherence_time; // T in units of 1/J; decay 1/T and dephasing 1/(4T) on chain spins
    bool full_spectrum = false;           // eigendecomposition instead of the linear solve
};

struct DiodeMetrics {
    double J_f = 0.0;
    double J_r = 0.0;
    double R = 0.0;
    double C = 0.0;
};

inline DiodeMetrics make_metrics(double j_f, double j_r) { return {j_f, j_r, rectification(j_f, j_r), contrast(j_f, j_r)}; }

/// Full set of dissipators for one bias, including decoherence and the shadow-spin decay.
inline std::vector<DissipatorSpec> bias_dissipators(const ModelSpec& spec, const BiasSetup& bias, const DiodeOptions& opts) {
    validate(bias, spec);
    std::vector<DissipatorSpec> d;
    d.push_back({bias.hot_site, bias.lambda_hot, bias.gamma, DissipatorKind::SpinLadder});
    d.push_back({bias.cold_site, bias.lambda_cold, bias.gamma, DissipatorKind::SpinLadder});
    if (opts.coherence_time) {
        const int shadow = shadow_site(spec);
        std::vector<int> chain;
        for (int s = 1; s <= spec.n_sites(); ++s)
            if (s != shadow) chain.push_back(s);
        const auto dec = decoherence_channels(chain, *opts.coherence_time);
        d.insert(d.end(), dec.begin(), dec.end());
    }
    if (const int s = shadow_site(spec); s > 0 && spec.gamma_S > 0.0)
        d.push_back({s, 0.0, spec.gamma_S * spec.J, DissipatorKind::Decay_T1});
    return d;
}

inline Liouvillian diode_liouvillian(const ModelSpec& spec, const BiasSetup& bias, const DiodeOptions& opts = {}) {
    const auto d = bias_dissipators(spec, bias, opts);
    return assemble_liouvillian(build_hamiltonian(spec), d);
}

struct BiasResult {
    Operator rho;
    double current_left = 0.0;  // on the left boundary bond
    double current_right = 0.0; // on the right boundary bond
    double residual = 0.0;
    int degeneracy = 1;
    std::vector<std::string> warnings;
};

struct DiodeEvaluation {
    DiodeMetrics metrics;
    BiasResult forward;
    BiasResult reverse;

    double continuity_error() const {
        return std::max(std::abs(forward.current_left - forward.current_right),
                        std::abs(reverse.current_left - reverse.current_right));
    }
};

inline BiasResult solve_bias(const ModelSpec& spec, const BiasSetup& bias, const DiodeOptions& opts) {
    const Liouvillian l = diode_liouvillian(spec, bias, opts);
    SteadyStateResult ss;
    try {
        if (opts.full_spectrum) {
            ss = steady_states(l);
            if (ss.degeneracy != 1) throw DegenerateSteadyState("steady state not unique");
        } else {
            ss = solve_steady_state(l);
        }
    } catch (const DegenerateSteadyState& e) {
        throw DegenerateSteadyState(std::string(e.what()) + " (delta = " + std::to_string(spec.delta) +
                                    "; delta = 0 conserves the 3-4 exchange parity)");
    }
    const auto [bl, br] = current_bonds(spec);
    const int n = spec.n_sites();
    BiasResult out;
    out.current_left = expectation(ss.rho_ss, spin_current_op(n, bl.first, bl.second, spec.J));
    out.current_right = expectation(ss.rho_ss, spin_current_op(n, br.first, br.second, spec.J));
    out.rho = std::move(ss.rho_ss);
    out.residual = ss.residual;
    out.degeneracy = ss.degeneracy;
    out.warnings = std::move(ss.warnings);
    return out;
}

/// Forward bias puts the hot bath on the left end, reverse on the right. Currents are
/// read on the left bond, positive left to right.
inline DiodeEvaluation evaluate_diode(const ModelSpec& spec, const DiodeOptions& opts = {}) {
    DiodeEvaluation ev;
    ev.forward = solve_bias(spec, forward_bias(spec, opts.gamma, opts.lambda_hot, opts.lambda_cold), opts);
    ev.reverse = solve_bias(spec, reverse_bias(spec, opts.gamma, opts.lambda_hot, opts.lambda_cold), opts);
    ev.metrics = make_metrics(ev.forward.current_left, ev.reverse.current_left);
    return ev;
}

/// Reduced state of the two interface spins (3, 4 in the diode numbering).
inline std::vector<int> interface_sites(const ModelSpec& spec) {
    switch (spec.variant) {
    case Variant::Extended_XXm:
    case Variant::Extended_XXZm: return {4, 5};
    case Variant::LinearReference: throw ConfigError("interface: the linear reference has no interface pair");
    default: return {3, 4};
    }
}

inline Operator interface_state(const ModelSpec& spec, const Operator& rho) {
    const auto s = interface_sites(spec);
    return partial_trace(rho, s);
}

} // namespace spindiode
