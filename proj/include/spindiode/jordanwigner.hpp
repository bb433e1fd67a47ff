// Spinless-fermion image of the diode

#pragma once

#include <vector>

#include "spindiode/fermions.hpp"
#include "spindiode/observables.hpp"

namespace spindiode {

/// H/J = K12 + (1+d)K23 + (-1)^n3 K24 + J34 K34 + (-1)^n4 K35 + K45 + K56 - 2 Delta (n1 - n2)^2.
/// Equal to the spin Hamiltonian minus the constant Delta*J.
inline Operator build_jw_hamiltonian(const ModelSpec& spec, const FermionOps& ops) {
    if (spec.variant != Variant::Diode) throw ConfigError("model.variant: the fermionic image is built for Diode only");
    validate(spec);
    if (ops.n_sites != 6) throw DimensionError("build_jw_hamiltonian: needs six fermion modes");
    const double J = spec.J;
    const Operator n12 = ops.occupation(1) - ops.occupation(2);
    Operator h = hopping(ops, 1, 2);
    h += (1.0 + spec.delta) * hopping(ops, 2, 3);
    h += parity(ops, 3) * hopping(ops, 2, 4);
    h += spec.J34 * hopping(ops, 3, 4);
    h += parity(ops, 4) * hopping(ops, 3, 5);
    h += hopping(ops, 4, 5);
    h += hopping(ops, 5, 6);
    h -= 2.0 * spec.Delta * n12 * n12;
    return J * h;
}

inline Operator build_jw_hamiltonian(const ModelSpec& spec) { return build_jw_hamiltonian(spec, jw_fermions(6)); }

/// j_ij = 2iJ (a_i^dag a_j - a_j^dag a_i), from the continuity equation of n_i.
inline Operator fermion_current_op(const FermionOps& ops, int i, int j, double J = 1.0) {
    const Operator& ai = ops.annihilator(i);
    const Operator& aj = ops.annihilator(j);
    return cplx(0.0, 2.0 * J) * (ai.adjoint() * aj - aj.adjoint() * ai);
}

struct FermionEvaluation {
    DiodeMetrics metrics;
    double continuity_f = 0.0;
    double continuity_r = 0.0;
    Operator rho_f;
    Operator rho_r;
};

/// Fermionic baths on modes 1 and 6 (a and a^dag ladder channels), currents from the fermion j_12.
inline FermionEvaluation fermionic_current_metrics(const ModelSpec& spec, const DiodeOptions& opts = {}) {
    const FermionOps ops = jw_fermions(6);
    const Operator h = build_jw_hamiltonian(spec, ops);
    const Operator j12 = fermion_current_op(ops, 1, 2, spec.J);
    const Operator j56 = fermion_current_op(ops, 5, 6, spec.J);
    auto solve = [&](int hot, int cold, double& continuity) {
        const DissipatorSpec d[] = {{hot, opts.lambda_hot, opts.gamma, DissipatorKind::FermionLadder},
                                    {cold, opts.lambda_cold, opts.gamma, DissipatorKind::FermionLadder}};
        const Liouvillian l = assemble_liouvillian(h, d);
        const SteadyStateResult ss = solve_steady_state(l);
        continuity = std::abs(expectation(ss.rho_ss, j12) - expectation(ss.rho_ss, j56));
        return ss.rho_ss;
    };
    FermionEvaluation ev;
    ev.rho_f = solve(1, 6, ev.continuity_f);
    ev.rho_r = solve(6, 1, ev.continuity_r);
    ev.metrics = make_metrics(expectation(ev.rho_f, j12), expectation(ev.rho_r, j12));
    return ev;
}

} // namespace spindiode
