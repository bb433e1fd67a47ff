// spindiode command-line frontend: sweeps, figure presets and single steady states.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "spindiode/presets.hpp"

using namespace spindiode;
using nlohmann::json;

namespace {

json load_json_arg(const std::string& arg, const std::string& what) {
    const bool inline_json = !arg.empty() && (arg.front() == '{' || arg.front() == '[');
    const std::string text = inline_json ? arg : read_file(arg);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": not valid JSON (" + e.what() + ")");
    }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

int cmd_sweep(const std::string& config, const std::string& out, const std::string& format, std::optional<int> workers) {
    const SweepConfig c = parse_sweep_config(load_json_arg(config, "--config"));
    const std::size_t n = grid_size(c);
    const SweepTable t = run_sweep(c, workers, [n](std::size_t done, std::size_t) {
        if (done == n || done % 16 == 0) std::cerr << "\r" << done << "/" << n << std::flush;
    });
    std::cerr << "\n";
    export_table(t, out, format);
    std::size_t failed = 0;
    for (const auto& e : t.errors) failed += !e.empty();
    if (failed) std::cerr << failed << " point(s) failed; see the error column\n";
    return 0;
}

int cmd_figure(const std::string& preset, const std::string& dir, std::optional<int> points, std::optional<int> workers,
               const std::string& format) {
    PresetOptions o;
    if (points) {
        if (*points < 1) throw ConfigError("--points: must be >= 1");
        o.override_points(*points);
    }
    o.workers = workers;
    o.verbose = true;
    std::vector<std::string> names;
    if (preset == "all") names = preset_names();
    else names.push_back(preset);
    std::filesystem::create_directories(dir);
    for (const std::string& name : names) {
        std::cerr << name << "\n";
        for (const NamedTable& t : run_preset(name, o)) {
            const auto path = std::filesystem::path(dir) / (t.name + "." + format);
            export_table(t.table, path.string(), format);
            std::cerr << "  wrote " << path.string() << "\n";
        }
    }
    return 0;
}

int cmd_steady(const std::string& model_arg, const std::string& bias) {
    json in = load_json_arg(model_arg, "--model");
    json model = in.contains("model") ? in["model"] : in;
    const BathConfig b = detail::parse_bath(in.value("bath", json()));
    const ModelSpec spec = model_from_json(model);
    if (bias != "forward" && bias != "reverse") throw ConfigError("--bias: expected forward or reverse");
    const bool fwd = bias == "forward";
    json out{{"model", to_json(spec)}, {"bias", bias}};

    if (spec.variant == Variant::Heat_HQ) {
        const HeatOptions o = heat_options(b);
        const auto [l, r] = bath_sites(spec);
        const HeatBiasResult res = solve_heat_bias(build_hamiltonian(spec), l, r, fwd ? o.T_H : o.T_C, fwd ? o.T_C : o.T_H, o);
        out["K"] = res.K;
        out["K_balance"] = res.K_balance;
        out["residual"] = res.residual;
        out["magnetization"] = magnetization_profile(res.rho);
    } else {
        const DiodeOptions o = diode_options(b);
        const BiasSetup setup = fwd ? forward_bias(spec, o.gamma, o.lambda_hot, o.lambda_cold)
                                    : reverse_bias(spec, o.gamma, o.lambda_hot, o.lambda_cold);
        const BiasResult res = solve_bias(spec, setup, o);
        out["current_left"] = res.current_left;
        out["current_right"] = res.current_right;
        out["continuity"] = std::abs(res.current_left - res.current_right);
        out["residual"] = res.residual;
        out["degeneracy"] = res.degeneracy;
        out["magnetization"] = magnetization_profile(res.rho);
        if (spec.variant != Variant::LinearReference) {
            const Operator r34 = interface_state(spec, res.rho);
            out["interface_fidelity_psi_minus"] = number_or_null(fidelity_pure(r34, bell::psi_minus()));
            out["interface_fidelity_psi_plus"] = number_or_null(fidelity_pure(r34, bell::psi_plus()));
            out["interface_concurrence"] = number_or_null(concurrence(r34));
        }
        out["warnings"] = res.warnings;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-diode open-system simulator"};
    app.set_version_flag("--version", SPINDIODE_VERSION);
    app.require_subcommand(1);

    std::string config, out, format = "csv";
    std::optional<int> workers;
    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep from a JSON config");
    sweep->add_option("--config", config, "Config file or inline JSON")->required();
    sweep->add_option("--out", out, "Output file")->required();
    sweep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--workers", workers, "Worker threads (fallback: SPINDIODE_WORKERS)");

    std::string preset, dir, fig_format = "csv";
    std::optional<int> points, fig_workers;
    auto* figure = app.add_subcommand("figure", "Regenerate the data of a named preset");
    figure->add_option("preset", preset, "Preset name, or 'all'")->required();
    figure->add_option("--out", dir, "Output directory")->required();
    figure->add_option("--points", points, "Points per continuous axis (overrides every preset default)");
    figure->add_option("--workers", fig_workers, "Worker threads (fallback: SPINDIODE_WORKERS)");
    figure->add_option("--format", fig_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    std::string model, bias = "forward";
    auto* steady = app.add_subcommand("steady", "Steady state of one bias, printed as JSON");
    steady->add_option("--model", model, "Model JSON (inline or file); may wrap {model, bath}")->required();
    steady->add_option("--bias", bias, "forward or reverse")->check(CLI::IsMember({"forward", "reverse"}));

    app.add_subcommand("presets", "List preset names")->callback([] {
        for (const auto& n : preset_names()) std::cout << n << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sweep) return cmd_sweep(config, out, format, workers);
        if (*figure) return cmd_figure(preset, dir, points, fig_workers, fig_format);
        if (*steady) return cmd_steady(model, bias);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
