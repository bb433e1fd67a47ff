#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "spindiode/presets.hpp"

using namespace spindiode;
using nlohmann::json;

namespace {

json small_config() {
    return json::parse(R"j({
        "model": {"variant": "Diode", "delta": 0.1},
        "axes": [{"path": "model.Delta", "values": [1.0, 3.0, 5.0]}],
        "coupled": {"model.J34": "critical_j34(model.Delta)"},
        "outputs": ["J_f", "J_r", "R", "C", "continuity"]
    })j");
}

std::string config_error(const json& j) {
    try {
        parse_sweep_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::size_t count_fields(const std::string& line) {
    std::size_t n = 1;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') quoted = !quoted;
        else if (c == ',' && !quoted) ++n;
    }
    return n;
}

} // namespace

TEST(Expr, Evaluation) {
    const std::map<std::string, double> vars{{"model.Delta", 5.0}, {"x", 2.0}};
    EXPECT_DOUBLE_EQ(expr::eval(expr::parse("critical_j34(model.Delta)"), vars), -6.3);
    EXPECT_DOUBLE_EQ(expr::eval(expr::parse("-critical_j34(model.Delta)"), vars), 6.3);
    EXPECT_DOUBLE_EQ(expr::eval(expr::parse("critical_j34_heat(x) * 2"), vars), 6.6);
    EXPECT_DOUBLE_EQ(expr::eval(expr::parse("(x + 1) / 3 - -1"), vars), 2.0);
    EXPECT_DOUBLE_EQ(expr::eval(expr::parse("1e-2 * x"), vars), 0.02);
    EXPECT_THROW(expr::parse("sin(x)"), ConfigError);
    EXPECT_THROW(expr::parse("x +"), ConfigError);
    EXPECT_THROW(expr::eval(expr::parse("y"), vars), ConfigError);
}

TEST(SweepConfig, AxisForms) {
    json j = small_config();
    j["axes"][0] = {{"path", "model.Delta"}, {"linspace", {0.0, 1.0, 5}}};
    SweepConfig c = parse_sweep_config(j);
    ASSERT_EQ(c.axes[0].values.size(), 5u);
    EXPECT_DOUBLE_EQ(c.axes[0].values[2], 0.5);
    j["axes"][0] = {{"path", "model.Delta"}, {"logspace", {0.1, 10.0, 3}}};
    c = parse_sweep_config(j);
    EXPECT_NEAR(c.axes[0].values[1], 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(c.axes[0].values[2], 10.0);
}

TEST(SweepConfig, ValidationMessagesCarryFieldPaths) {
    json j = small_config();
    j["axes"][0]["path"] = "model.bogus";
    EXPECT_NE(config_error(j).find("axes[0]"), std::string::npos);
    j = small_config();
    j["coupled"] = {{"model.J34", "critical_j34(model.h)"}};
    EXPECT_NE(config_error(j).find("coupled"), std::string::npos);
    j = small_config();
    j["outputs"] = {"R", "nope"};
    EXPECT_NE(config_error(j).find("outputs"), std::string::npos);
    j = small_config();
    j["extra"] = 1;
    EXPECT_NE(config_error(j).find("extra"), std::string::npos);
    j = small_config();
    j["bath"] = {{"lambda_hot", 2.0}};
    EXPECT_NE(config_error(j).find("bath.lambda_hot"), std::string::npos);
    j = small_config();
    j["axes"][0] = {{"path", "model.Delta"}, {"logspace", {0.0, 1.0, 3}}};
    EXPECT_NE(config_error(j).find("axes[0]"), std::string::npos);
    j = small_config();
    j["model"]["variant"] = "Bad";
    EXPECT_NE(config_error(j).find("model.variant"), std::string::npos);
}

TEST(Sweep, RowCountAndOrder) {
    json j = small_config();
    j["axes"].push_back({{"path", "bath.gamma"}, {"values", {0.5, 1.0}}});
    const SweepConfig c = parse_sweep_config(j);
    EXPECT_EQ(grid_size(c), 6u);
    const SweepTable t = run_sweep(c, 1);
    ASSERT_EQ(t.rows.size(), 6u);
    // row-major: the last axis runs fastest
    EXPECT_EQ(t.at(0, "model.Delta"), 1.0);
    EXPECT_EQ(t.at(1, "model.Delta"), 1.0);
    EXPECT_EQ(t.at(1, "bath.gamma"), 1.0);
    EXPECT_EQ(t.at(2, "model.Delta"), 3.0);
    EXPECT_DOUBLE_EQ(t.at(2, "model.J34"), critical_j34(3.0));
    for (std::size_t r = 0; r < t.rows.size(); ++r) EXPECT_LT(t.at(r, "continuity"), 1e-8);
}

TEST(Sweep, SinglePointReproducesEvaluation) {
    json j = small_config();
    j["axes"][0]["values"] = {5.0};
    const SweepTable t = run_sweep(j);
    ModelSpec s;
    s.Delta = 5.0;
    s.delta = 0.1;
    s.J34 = critical_j34(5.0);
    const DiodeEvaluation ev = evaluate_diode(s);
    EXPECT_EQ(t.at(0, "J_f"), ev.metrics.J_f);
    EXPECT_EQ(t.at(0, "J_r"), ev.metrics.J_r);
    EXPECT_EQ(t.at(0, "R"), ev.metrics.R);
}

TEST(Sweep, ParallelEqualsSerial) {
    json j = small_config();
    j["axes"][0] = {{"path", "model.Delta"}, {"linspace", {0.5, 6.0, 6}}};
    const SweepTable a = run_sweep(j, 1);
    const SweepTable b = run_sweep(j, 4);
    EXPECT_EQ(a.rows, b.rows);
    EXPECT_EQ(a.errors, b.errors);
    EXPECT_EQ(to_csv(a), to_csv(b));
}

TEST(Sweep, WorkerResolution) {
    const SweepConfig c = parse_sweep_config(small_config());
    EXPECT_EQ(resolve_workers(3, c), 3);
    setenv("SPINDIODE_WORKERS", "2", 1);
    EXPECT_EQ(resolve_workers(std::nullopt, c), 2);
    setenv("SPINDIODE_WORKERS", "zero", 1);
    EXPECT_THROW(resolve_workers(std::nullopt, c), ConfigError);
    unsetenv("SPINDIODE_WORKERS");
    EXPECT_EQ(resolve_workers(std::nullopt, c), 1);
}

TEST(Sweep, FailedPointsKeepTheirRow) {
    // delta = 0 makes the steady state degenerate; that point must show up with an error
    json j = small_config();
    j["axes"][0] = {{"path", "model.delta"}, {"values", {0.1, 0.0}}};
    j["coupled"] = json::object();
    j["model"]["Delta"] = 5.0;
    j["model"]["J34"] = -6.3;
    const SweepTable t = run_sweep(j);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_TRUE(t.errors[0].empty());
    EXPECT_FALSE(t.errors[1].empty());
    EXPECT_EQ(t.at(1, "model.delta"), 0.0);
    EXPECT_TRUE(std::isnan(t.at(1, "R")));
    const std::string csv = to_csv(t);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    const std::size_t cols = count_fields(line);
    while (std::getline(is, line)) EXPECT_EQ(count_fields(line), cols);
}

TEST(Sweep, ExpandedOutputs) {
    json j = small_config();
    j["axes"][0]["values"] = {5.0};
    j["outputs"] = {"magnetization_r", "fidelity_psi_minus", "concurrence", "R_jw"};
    const SweepTable t = run_sweep(j);
    EXPECT_NO_THROW(t.column("magnetization_r_6"));
    EXPECT_LT(t.at(0, "magnetization_r_1"), -0.9);
    EXPECT_GT(t.at(0, "fidelity_psi_minus"), 0.99);
    EXPECT_GT(t.at(0, "R_jw"), 1e3);
}

TEST(Sweep, LocalFieldPath) {
    json j = json::parse(R"j({"model": {"variant": "DiodePerturbed", "Delta": 5, "delta": 0.03, "J34": -6.3},
        "axes": [{"path": "model.local_fields.5", "values": [0.0, 0.2]}], "outputs": ["R"]})j");
    const SweepTable t = run_sweep(j);
    EXPECT_TRUE(t.errors[0].empty() && t.errors[1].empty());
    EXPECT_NE(t.at(0, "R"), t.at(1, "R"));
}

TEST(Export, CsvFormat) {
    SweepTable t;
    t.header = {"a", "b,c"};
    t.rows = {{0.1, std::numeric_limits<double>::infinity()}, {1.0 / 3.0, std::numeric_limits<double>::quiet_NaN()}};
    t.errors = {"", "bad \"thing\", here"};
    const std::string csv = to_csv(t);
    EXPECT_EQ(csv, "a,\"b,c\",error\r\n"
                   "0.10000000000000001,inf,\r\n"
                   "0.33333333333333331,nan,\"bad \"\"thing\"\", here\"\r\n");
}

TEST(Export, JsonRoundTrip) {
    SweepTable t;
    t.header = {"x", "R"};
    t.rows = {{1.0, std::numeric_limits<double>::infinity()}, {2.0, -std::numeric_limits<double>::infinity()}, {3.0, 0.25}};
    t.errors = {"", "", "oops"};
    t.provenance.config_hash = "abc";
    t.provenance.timestamp = "2026-01-01T00:00:00Z";
    const json j = to_json(t);
    EXPECT_TRUE(j["rows"][0]["R"].is_null());
    EXPECT_TRUE(j["rows"][0]["R_is_inf"].get<bool>());
    EXPECT_TRUE(j["rows"][1]["R_is_neg_inf"].get<bool>());
    const SweepTable back = table_from_json(j);
    EXPECT_EQ(back.rows, t.rows);
    EXPECT_EQ(back.errors, t.errors);
    EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(Export, FilesAndErrors) {
    SweepTable t;
    t.header = {"x"};
    t.rows = {{1.0}};
    t.errors = {""};
    const auto dir = std::filesystem::temp_directory_path() / "spindiode_export_test";
    std::filesystem::create_directories(dir);
    export_table(t, (dir / "t.json").string(), "json");
    EXPECT_EQ(table_from_json(json::parse(read_file((dir / "t.json").string()))).rows, t.rows);
    EXPECT_THROW(export_table(t, (dir / "t.txt").string(), "xml"), ConfigError);
    EXPECT_THROW(export_table(t, "/nonexistent-dir/t.csv", "csv"), Error);
    EXPECT_THROW(export_table(SweepTable{}, (dir / "e.csv").string(), "csv"), ConfigError);
}

TEST(Provenance, HashTracksConfig) {
    const json base = small_config();
    const std::string h = config_hash(base);
    EXPECT_EQ(h.size(), 64u);
    EXPECT_EQ(config_hash(base), h);
    json w = base;
    w["workers"] = 8;
    EXPECT_EQ(config_hash(w), h);
    for (const char* path : {"/model/delta", "/axes/0/values/0", "/coupled/model.J34", "/outputs/0"}) {
        json m = base;
        const json::json_pointer p(path);
        if (m[p].is_number()) m[p] = m[p].get<double>() + 1e-9;
        else m[p] = m[p].get<std::string>() + " ";
        EXPECT_NE(config_hash(m), h) << path;
    }
    const SweepTable t = run_sweep(base);
    EXPECT_EQ(t.provenance.config_hash, h);
    EXPECT_EQ(t.provenance.version, SPINDIODE_VERSION);
}

TEST(Provenance, Sha256KnownAnswer) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Presets, NamesAndUnknown) {
    const auto names = preset_names();
    EXPECT_EQ(names.size(), 18u);
    PresetOptions o;
    EXPECT_THROW(run_preset("fig99", o), ConfigError);
}

TEST(Presets, SmallResolutionRuns) {
    PresetOptions o;
    o.override_points(2);
    for (const char* name : {"fig2b", "fig3d", "fig6c"}) {
        const auto tables = run_preset(name, o);
        ASSERT_FALSE(tables.empty()) << name;
        for (const auto& t : tables) {
            EXPECT_FALSE(t.table.rows.empty()) << t.name;
            for (const auto& e : t.table.errors) EXPECT_TRUE(e.empty()) << t.name << ": " << e;
        }
    }
}

TEST(Presets, ResonanceDynamicsTable) {
    const SweepTable t = resonance_dynamics(20.0, 1.0);
    ASSERT_EQ(t.rows.size(), 21u);
    EXPECT_DOUBLE_EQ(t.at(0, "F_initial"), 1.0);
    EXPECT_LT(t.at(20, "F_initial"), 1.0);
}
