// Named sweeps regenerating the data behind each figure

#pragma once

#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "spindiode/sweep.hpp"

namespace spindiode {

struct PresetOptions {
    int points = 64;        // per continuous axis, 1-D presets
    int points_2d = 48;     // per axis, 2-D landscapes
    int points_heavy = 16;  // per axis, sweeps over 7-spin models with the shadow spin
    std::optional<int> workers;
    bool verbose = false;

    /// --points N sets every resolution.
    void override_points(int n) { points = points_2d = points_heavy = n; }
};

struct NamedTable {
    std::string name; // file stem
    SweepTable table;
};

namespace detail {

inline json lin(double a, double b, int n) { return json::array({a, b, n}); }

inline json axis(const std::string& path, const char* kind, json spec) {
    json a{{"path", path}};
    a[kind] = std::move(spec);
    return a;
}

inline json base_config(json model, json axes, json outputs) {
    return json{{"model", std::move(model)}, {"axes", std::move(axes)}, {"outputs", std::move(outputs)}};
}

inline NamedTable sweep(const std::string& name, const json& cfg, const PresetOptions& o) {
    if (o.verbose) std::cerr << "  " << name << ": " << grid_size(parse_sweep_config(cfg)) << " points\n";
    return {name, run_sweep(parse_sweep_config(cfg), o.workers)};
}

inline SweepTable custom_table(std::vector<std::string> header, const json& description) {
    SweepTable t;
    t.header = std::move(header);
    t.provenance.config_hash = config_hash(description);
    t.provenance.timestamp = utc_timestamp();
    return t;
}

inline void push_row(SweepTable& t, std::vector<double> row) {
    t.rows.push_back(std::move(row));
    t.errors.emplace_back();
}

inline const json kDeltas = json::array({0.01, 0.03, 0.1});

} // namespace detail

/// The eight pure initial states of the uniqueness study; the two bias steady states complete the ten.
inline std::vector<StateVector> relaxation_test_states() {
    const StateVector p = (up() + down()) / std::sqrt(2.0);
    const StateVector m = (up() - down()) / std::sqrt(2.0);
    const StateVector s1 = product_state("uuuuuu");
    const StateVector s2 = product_state("dddddd");
    const StateVector s6 = product_state("ududud");
    const StateVector s7 = product_state("dududu");
    return {s1, s2, (s1 + s2) / std::sqrt(2.0), kron_all({p, p, p, p, p, p}), kron_all({m, m, m, m, m, m}),
            s6, s7, (s6 + s7) / std::sqrt(2.0)};
}

/// Dynamics from |dd uu dd> with both ends cold: fidelities with the initial state,
/// |Psi- Psi- dd> and |dd Psi- dd>.
inline SweepTable resonance_dynamics(double t_end = 200.0, double dt = 0.5, double Delta = 100.0, double delta = 0.1) {
    ModelSpec s;
    s.Delta = Delta;
    s.delta = delta;
    s.J34 = -(Delta + 1.0);
    const DissipatorSpec d[] = {{1, 0.0, 1.0, DissipatorKind::SpinLadder}, {6, 0.0, 1.0, DissipatorKind::SpinLadder}};
    const Liouvillian l = assemble_liouvillian(build_hamiltonian(s), d);
    const StateVector init = product_state("dduudd");
    const StateVector mid = kron_all({bell::psi_minus(), bell::psi_minus(), down(), down()});
    const StateVector gate = kron_all({down(), down(), bell::psi_minus(), down(), down()});
    const auto ts = uniform_times(t_end, dt);
    const auto traj = propagate(l, projector(init), ts);
    SweepTable t = detail::custom_table({"t", "F_initial", "F_psi_psi", "F_gate"},
                                        {{"dynamics", to_json(s)}, {"t_end", t_end}, {"dt", dt}, {"baths", "cold,cold"}});
    for (std::size_t k = 0; k < ts.size(); ++k)
        detail::push_row(t, {ts[k], fidelity_pure(traj[k], init), fidelity_pure(traj[k], mid), fidelity_pure(traj[k], gate)});
    return t;
}

inline std::vector<std::string> preset_names() {
    return {"fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4bc",
            "fig4d", "fig4e", "fig5",  "fig6a", "fig6b", "fig6c", "fig7abc", "fig8ab", "fig9abcd"};
}

inline std::vector<NamedTable> run_preset(const std::string& name, const PresetOptions& o) {
    using detail::axis;
    using detail::base_config;
    using detail::kDeltas;
    using detail::lin;
    using detail::sweep;
    const int n1 = o.points, n2 = o.points_2d, nh = o.points_heavy;
    const json diode = {{"variant", "Diode"}, {"delta", 0.01}};
    const json on_line = {{"model.J34", "critical_j34(model.Delta)"}};
    std::vector<NamedTable> out;

    if (name == "fig2a") {
        json c = base_config(diode, {axis("model.Delta", "linspace", lin(0.0, 10.0, n2)), axis("model.J34", "linspace", lin(-12.0, 0.0, n2))},
                             {"R", "C", "J_f", "J_r"});
        out.push_back(sweep("fig2a", c, o));
    } else if (name == "fig2b") {
        json c = base_config(diode, {axis("model.delta", "values", kDeltas), axis("model.Delta", "logspace", lin(0.1, 10.0, n1))},
                             {"R", "C", "J_f", "J_r", "continuity"});
        c["coupled"] = on_line;
        out.push_back(sweep("fig2b", c, o));
        json r = base_config({{"variant", "LinearReference"}}, {axis("model.Delta", "logspace", lin(0.1, 10.0, n1))}, {"R", "J_f", "J_r"});
        out.push_back(sweep("fig2b_linear", r, o));
    } else if (name == "fig2c") {
        json c = base_config(diode, {axis("model.Delta", "logspace", lin(0.1, 10.0, n1))}, {"J_f", "J_r", "R"});
        c["coupled"] = on_line;
        out.push_back(sweep("fig2c", c, o));
    } else if (name == "fig3a") {
        json c = base_config(diode, {axis("model.Delta", "linspace", lin(0.0, 10.0, n1))}, {"C", "fidelity_psi_minus", "R", "continuity"});
        c["coupled"] = on_line;
        out.push_back(sweep("fig3a", c, o));
    } else if (name == "fig3b") {
        const json m = {{"variant", "DiodePerturbed"}, {"delta", 0.03}, {"Delta", 5.0}, {"J34", critical_j34(5.0)}};
        for (const char* f : {"h3", "h4", "delta_prime"}) {
            json c = base_config(m, {axis(std::string("model.") + f, "linspace", lin(-1.0, 1.0, n1))}, {"R", "C"});
            out.push_back(sweep(std::string("fig3b_") + f, c, o));
        }
    } else if (name == "fig3c") {
        json m = {{"delta", 0.1}, {"Delta", 5.0}, {"J34", critical_j34(5.0)}};
        json c = base_config(m, {axis("bath.coherence_time", "logspace", lin(1e2, 1e6, n1))}, {"R", "J_f", "J_r"});
        c["model"]["variant"] = "Diode";
        out.push_back(sweep("fig3c_diode", c, o));
        json s = base_config(m, {axis("bath.coherence_time", "logspace", lin(1e2, 1e6, nh))}, {"R", "J_f", "J_r"});
        s["model"]["variant"] = "ShadowCorrected";
        out.push_back(sweep("fig3c_corrected", s, o));
        json r = base_config({{"variant", "LinearReference"}, {"Delta", 5.0}}, {axis("bath.coherence_time", "logspace", lin(1e2, 1e6, n1))},
                             {"R", "J_f", "J_r"});
        out.push_back(sweep("fig3c_linear", r, o));
    } else if (name == "fig3d") {
        json c = base_config({{"variant", "Heat_HQ"}}, {axis("model.delta", "values", kDeltas), axis("model.h", "linspace", lin(0.5, 10.0, n1))},
                             {"R_Q", "K_f", "K_r", "heat_balance"});
        c["coupled"] = {{"model.J34", "critical_j34_heat(model.h)"}};
        out.push_back(sweep("fig3d", c, o));
        json r = base_config({{"variant", "LinearReference"}}, {axis("model.h", "linspace", lin(0.5, 10.0, n1))}, {"R_Q", "K_f", "K_r"});
        out.push_back(sweep("fig3d_linear", r, o));
    } else if (name == "fig4a") {
        out.push_back({"fig4a", resonance_dynamics()});
    } else if (name == "fig4bc") {
        json c = base_config({{"variant", "Diode"}, {"delta", 0.01}, {"Delta", 5.0}, {"J34", critical_j34(5.0)}},
                             json::array(), {"magnetization_f", "magnetization_r", "R"});
        out.push_back(sweep("fig4bc", c, o));
    } else if (name == "fig4d") {
        const json m = {{"variant", "DiodePerturbed"}, {"delta", 0.03}, {"Delta", 5.0}, {"J34", critical_j34(5.0)}};
        for (int site : {1, 2, 5, 6}) {
            json c = base_config(m, {axis("model.local_fields." + std::to_string(site), "linspace", lin(-1.0, 1.0, n1))}, {"R", "C"});
            out.push_back(sweep("fig4d_h" + std::to_string(site), c, o));
        }
    } else if (name == "fig4e") {
        json c = base_config({{"variant", "Diode"}, {"delta", 0.1}},
                             {axis("bath.coherence_time", "values", {1e3, 1e4, 1e5}), axis("model.Delta", "linspace", lin(0.5, 10.0, n1))},
                             {"R", "J_f", "J_r"});
        c["coupled"] = on_line;
        out.push_back(sweep("fig4e_diode", c, o));
        json s = c;
        s["model"]["variant"] = "ShadowCorrected";
        s["axes"][1]["linspace"] = lin(0.5, 10.0, nh);
        out.push_back(sweep("fig4e_corrected", s, o));
    } else if (name == "fig5") {
        ModelSpec s;
        s.delta = 0.1;
        s.Delta = 5.0;
        s.J34 = critical_j34(5.0);
        const Liouvillian lf = diode_liouvillian(s, forward_bias(s));
        const Liouvillian lr = diode_liouvillian(s, reverse_bias(s));
        const SteadyStateResult sf = steady_states(lf);
        const SteadyStateResult sr = steady_states(lr);
        const json desc = {{"model", to_json(s)}, {"gamma", 1.0}};
        SweepTable spec = detail::custom_table({"index", "re_forward", "im_forward", "re_reverse", "im_reverse"}, desc);
        for (std::size_t k = 0; k < sf.spectrum.size(); ++k)
            detail::push_row(spec, {static_cast<double>(k), sf.spectrum[k].real(), sf.spectrum[k].imag(), sr.spectrum[k].real(),
                                    sr.spectrum[k].imag()});
        out.push_back({"fig5_spectrum", std::move(spec)});

        std::vector<Operator> inits;
        for (const StateVector& v : relaxation_test_states()) inits.push_back(projector(v));
        inits.push_back(sf.rho_ss);
        inits.push_back(sr.rho_ss);
        const auto ts = uniform_times(1500.0, 5.0);
        for (int b = 0; b < 2; ++b) {
            std::vector<std::string> header{"t"};
            for (int k = 1; k <= 8; ++k) header.push_back("F_psi" + std::to_string(k));
            header.push_back("F_rho_ss_f");
            header.push_back("F_rho_ss_r");
            SweepTable t = detail::custom_table(header, {{"convergence", b == 0 ? "forward" : "reverse"}, {"model", to_json(s)}});
            std::vector<std::vector<double>> cols;
            const Operator& target = b == 0 ? sf.rho_ss : sr.rho_ss;
            for (const auto& traj : propagate_many(b == 0 ? lf : lr, inits, ts)) {
                std::vector<double> f;
                for (const Operator& rho : traj) f.push_back(fidelity_mixed(rho, target));
                cols.push_back(std::move(f));
            }
            for (std::size_t k = 0; k < ts.size(); ++k) {
                std::vector<double> row{ts[k]};
                for (const auto& c : cols) row.push_back(c[k]);
                detail::push_row(t, std::move(row));
            }
            out.push_back({b == 0 ? "fig5_convergence_forward" : "fig5_convergence_reverse", std::move(t)});
        }
    } else if (name == "fig6a") {
        json c = base_config({{"variant", "DiodePerturbed"}, {"Delta", 5.0}},
                             {axis("model.delta", "values", kDeltas), axis("model.J34", "linspace", lin(-10.0, -3.0, n1))}, {"R", "C"});
        c["coupled"] = {{"model.delta_prime", "model.delta"}};
        out.push_back(sweep("fig6a", c, o));
    } else if (name == "fig6b") {
        json c = base_config(diode, {axis("bath.gamma", "values", {0.1, 1.0, 5.0}), axis("model.Delta", "logspace", lin(0.1, 10.0, n1))},
                             {"R", "J_f", "J_r"});
        c["coupled"] = on_line;
        out.push_back(sweep("fig6b", c, o));
    } else if (name == "fig6c") {
        json c = base_config(diode, {axis("model.delta", "values", kDeltas), axis("model.Delta", "logspace", lin(0.1, 10.0, n1))},
                             {"R_jw", "J_f_jw", "J_r_jw", "continuity_jw"});
        c["coupled"] = on_line;
        out.push_back(sweep("fig6c", c, o));
    } else if (name == "fig7abc") {
        const json hq = {{"variant", "Heat_HQ"}, {"delta", 0.01}};
        json a = base_config(hq, {axis("model.h", "linspace", lin(0.0, 10.0, n2)), axis("model.J34", "linspace", lin(0.0, 12.0, n2))},
                             {"R_Q", "K_f", "K_r"});
        out.push_back(sweep("fig7a", a, o));
        json b = base_config({{"variant", "Heat_HQ"}}, {axis("model.delta", "values", kDeltas), axis("model.h", "linspace", lin(0.5, 10.0, n1))},
                             {"R_Q", "K_f", "K_r"});
        b["coupled"] = {{"model.J34", "critical_j34_heat(model.h)"}};
        out.push_back(sweep("fig7b", b, o));
        json r = base_config({{"variant", "LinearReference"}}, {axis("model.h", "linspace", lin(0.5, 10.0, n1))}, {"R_Q", "K_f", "K_r"});
        out.push_back(sweep("fig7b_linear", r, o));
        json c = base_config(hq, {axis("model.h", "linspace", lin(0.5, 10.0, n1))}, {"K_f", "K_r", "R_Q", "heat_balance"});
        c["coupled"] = {{"model.J34", "critical_j34_heat(model.h)"}};
        out.push_back(sweep("fig7c", c, o));
    } else if (name == "fig8ab") {
        const json hq = {{"variant", "Heat_HQ"}, {"delta", 0.01}};
        const json tcs = json::array({0.1, 0.5, 1.0, 2.0, 5.0});
        json a = base_config(hq, {axis("bath.T_C", "values", tcs), axis("model.h", "linspace", lin(0.5, 10.0, n1))}, {"R_Q", "K_f", "K_r"});
        a["bath"] = {{"delta_T", 10.0}};
        a["coupled"] = {{"model.J34", "critical_j34_heat(model.h)"}};
        out.push_back(sweep("fig8a", a, o));
        json b = base_config(json{{"variant", "Heat_HQ"}, {"delta", 0.01}, {"h", 5.0}, {"J34", critical_j34_heat(5.0)}},
                             {axis("bath.T_C", "values", tcs), axis("bath.delta_T", "logspace", lin(0.1, 100.0, n1))}, {"R_Q", "K_f", "K_r"});
        out.push_back(sweep("fig8b", b, o));
    } else if (name == "fig9abcd") {
        json h1 = base_config({{"variant", "FieldVariant_H1"}, {"delta", 0.01}}, {axis("model.h", "linspace", lin(0.5, 10.0, n1))}, {"R", "C"});
        h1["coupled"] = {{"model.J34", "critical_j34_heat(model.h)"}};
        out.push_back(sweep("fig9a_h1", h1, o));
        json h2 = base_config({{"variant", "SignVariant_H2"}, {"delta", 0.01}}, {axis("model.Delta", "linspace", lin(0.5, 10.0, n1))},
                              {"R", "C", "fidelity_psi_plus", "concurrence"});
        h2["coupled"] = {{"model.J34", "-critical_j34(model.Delta)"}};
        out.push_back(sweep("fig9ab_h2", h2, o));
        for (const char* v : {"Extended_mXX", "Extended_XXm"}) {
            json c = base_config({{"variant", v}, {"delta", 0.01}}, {axis("model.Delta", "logspace", lin(0.1, 10.0, n1))}, {"R", "J_f", "J_r"});
            c["coupled"] = on_line;
            out.push_back(sweep(std::string("fig9c_") + v, c, o));
        }
        json d = base_config({{"variant", "Extended_XXZm"}, {"delta", 0.01}},
                             {axis("model.Delta", "linspace", lin(0.0, 8.0, n2)), axis("model.J34", "linspace", lin(-10.0, 0.0, n2))}, {"R", "C"});
        out.push_back(sweep("fig9d", d, o));
    } else {
        throw ConfigError("preset: unknown preset '" + name + "'");
    }
    return out;
}

} // namespace spindiode
