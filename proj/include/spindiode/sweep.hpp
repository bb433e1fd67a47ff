// Declarative parameter sweeps, worker pool, CSV/JSON tables

#pragma once

#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"

#include "spindiode/globalbath.hpp"
#include "spindiode/jordanwigner.hpp"
#include "spindiode/observables.hpp"

#ifndef SPINDIODE_VERSION
#define SPINDIODE_VERSION "0.1.0"
#endif

namespace spindiode {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Expressions: + - * / unary minus, numbers, variables, critical_j34(), critical_j34_heat()

namespace expr {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum Kind { Number, Variable, Neg, Add, Sub, Mul, Div, Call } kind;
    double value = 0.0;
    std::string name;
    NodePtr lhs, rhs;
};

inline bool known_function(const std::string& f) { return f == "critical_j34" || f == "critical_j34_heat"; }

class Parser {
public:
    explicit Parser(std::string src) : s_(std::move(src)) {}

    NodePtr parse() {
        NodePtr n = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

private:
    std::string s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("expression '" + s_ + "': " + why + " at position " + std::to_string(pos_));
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    static NodePtr make(Node::Kind k, NodePtr a, NodePtr b = nullptr) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }
    NodePtr sum() {
        NodePtr n = product();
        for (;;) {
            if (eat('+')) n = make(Node::Add, n, product());
            else if (eat('-')) n = make(Node::Sub, n, product());
            else return n;
        }
    }
    NodePtr product() {
        NodePtr n = unary();
        for (;;) {
            if (eat('*')) n = make(Node::Mul, n, unary());
            else if (eat('/')) n = make(Node::Div, n, unary());
            else return n;
        }
    }
    NodePtr unary() {
        if (eat('-')) return make(Node::Neg, unary());
        if (eat('+')) return unary();
        return primary();
    }
    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        if (eat('(')) {
            NodePtr n = sum();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            auto n = std::make_shared<Node>();
            n->kind = Node::Number;
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '.')) ++pos_;
            auto n = std::make_shared<Node>();
            n->name = s_.substr(start, pos_ - start);
            if (eat('(')) {
                if (!known_function(n->name)) fail("unknown function '" + n->name + "'");
                n->kind = Node::Call;
                n->lhs = sum();
                if (!eat(')')) fail("expected ')'");
            } else {
                n->kind = Node::Variable;
            }
            return n;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

inline NodePtr parse(const std::string& s) { return Parser(s).parse(); }

inline void variables(const NodePtr& n, std::vector<std::string>& out) {
    if (!n) return;
    if (n->kind == Node::Variable) out.push_back(n->name);
    variables(n->lhs, out);
    variables(n->rhs, out);
}

inline double eval(const NodePtr& n, const std::map<std::string, double>& vars) {
    switch (n->kind) {
    case Node::Number: return n->value;
    case Node::Variable: {
        auto it = vars.find(n->name);
        if (it == vars.end()) throw ConfigError("expression: unknown variable '" + n->name + "'");
        return it->second;
    }
    case Node::Neg: return -eval(n->lhs, vars);
    case Node::Add: return eval(n->lhs, vars) + eval(n->rhs, vars);
    case Node::Sub: return eval(n->lhs, vars) - eval(n->rhs, vars);
    case Node::Mul: return eval(n->lhs, vars) * eval(n->rhs, vars);
    case Node::Div: return eval(n->lhs, vars) / eval(n->rhs, vars);
    case Node::Call: {
        const double x = eval(n->lhs, vars);
        return n->name == "critical_j34" ? critical_j34(x) : critical_j34_heat(x);
    }
    }
    return 0.0;
}

} // namespace expr

// ---------------------------------------------------------------------------
// Config

struct BathConfig {
    double gamma = 1.0;
    double lambda_hot = 0.5;
    double lambda_cold = 0.0;
    std::optional<double> coherence_time;
    double T_C = 0.1;
    double T_H = 10.1;
    std::optional<double> delta_T; // when set, T_H = T_C + delta_T
    double secular_cutoff = 0.0;
    bool include_zero_frequency = true;
    bool full_spectrum = false;

    double hot_temperature() const { return delta_T ? T_C + *delta_T : T_H; }
};

inline DiodeOptions diode_options(const BathConfig& b) {
    DiodeOptions o;
    o.gamma = b.gamma;
    o.lambda_hot = b.lambda_hot;
    o.lambda_cold = b.lambda_cold;
    o.coherence_time = b.coherence_time;
    o.full_spectrum = b.full_spectrum;
    return o;
}

inline HeatOptions heat_options(const BathConfig& b) {
    HeatOptions o;
    o.T_C = b.T_C;
    o.T_H = b.hot_temperature();
    o.gamma = b.gamma;
    o.secular_cutoff = b.secular_cutoff;
    o.include_zero_frequency = b.include_zero_frequency;
    return o;
}

struct Axis {
    std::string name;
    std::string path; // empty: free variable used only by coupled expressions
    std::vector<double> values;
};

struct Coupled {
    std::string path;
    std::string source;
    expr::NodePtr expression;
};

struct SweepConfig {
    json model; // template document
    BathConfig bath;
    std::vector<Axis> axes;
    std::vector<Coupled> coupled;
    std::vector<std::string> outputs;
    int workers = 1;
    json source; // config as given, for provenance
};

inline const std::vector<std::string>& known_outputs() {
    static const std::vector<std::string> k = {
        "J_f", "J_r", "R", "C", "continuity", "fidelity_psi_minus", "fidelity_psi_plus", "concurrence",
        "magnetization_f", "magnetization_r", "K_f", "K_r", "R_Q", "heat_balance", "J_f_jw", "J_r_jw", "R_jw",
        "continuity_jw"};
    return k;
}

namespace detail {

inline double json_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

inline std::vector<double> parse_axis_values(const json& a, const std::string& where) {
    auto triple = [&](const char* key) {
        const json& v = a.at(key);
        if (!v.is_array() || v.size() != 3) throw ConfigError(where + "." + key + ": expected [start, stop, count]");
        const double lo = json_number(v[0], where + "." + key + "[0]");
        const double hi = json_number(v[1], where + "." + key + "[1]");
        if (!v[2].is_number_integer() || v[2].get<long>() < 1) throw ConfigError(where + "." + key + "[2]: count must be a positive integer");
        return std::tuple{lo, hi, v[2].get<int>()};
    };
    int kinds = a.contains("values") + a.contains("linspace") + a.contains("logspace");
    if (kinds != 1) throw ConfigError(where + ": exactly one of values, linspace, logspace is required");
    std::vector<double> out;
    if (a.contains("values")) {
        if (!a["values"].is_array() || a["values"].empty()) throw ConfigError(where + ".values: expected a non-empty array");
        for (std::size_t k = 0; k < a["values"].size(); ++k)
            out.push_back(json_number(a["values"][k], where + ".values[" + std::to_string(k) + "]"));
    } else if (a.contains("linspace")) {
        auto [lo, hi, n] = triple("linspace");
        for (int k = 0; k < n; ++k) out.push_back(n == 1 ? lo : lo + (hi - lo) * k / (n - 1));
    } else {
        auto [lo, hi, n] = triple("logspace");
        if (!(lo > 0.0) || !(hi > 0.0)) throw ConfigError(where + ".logspace: bounds must be positive");
        const double a0 = std::log10(lo), a1 = std::log10(hi);
        for (int k = 0; k < n; ++k) out.push_back(n == 1 ? lo : std::pow(10.0, a0 + (a1 - a0) * k / (n - 1)));
    }
    return out;
}

inline bool is_bath_field(const std::string& f) {
    static const char* k[] = {"gamma", "lambda_hot", "lambda_cold", "coherence_time", "T_C", "T_H", "delta_T", "secular_cutoff"};
    for (const char* x : k)
        if (f == x) return true;
    return false;
}

inline void check_path(const std::string& path, const json& model, const std::string& where) {
    if (path.rfind("model.", 0) == 0) {
        const std::string f = path.substr(6);
        if (f.rfind("local_fields.", 0) == 0) {
            const std::string idx = f.substr(13);
            if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos)
                throw ConfigError(where + ": '" + path + "' needs a 1-based site index");
            return;
        }
        static const char* numeric[] = {"J", "Delta", "delta", "J34", "h", "omega_global", "h3", "h4", "delta_prime", "A", "omega_drive", "gamma_S"};
        for (const char* x : numeric)
            if (f == x) return;
        (void)model;
        throw ConfigError(where + ": '" + path + "' is not a numeric model field");
    }
    if (path.rfind("bath.", 0) == 0 && is_bath_field(path.substr(5))) return;
    throw ConfigError(where + ": '" + path + "' does not resolve to a model or bath field");
}

inline BathConfig parse_bath(const json& b) {
    BathConfig c;
    if (b.is_null()) return c;
    if (!b.is_object()) throw ConfigError("bath: expected an object");
    for (const auto& [k, v] : b.items()) {
        const std::string w = "bath." + k;
        if (k == "gamma") c.gamma = json_number(v, w);
        else if (k == "lambda_hot") c.lambda_hot = json_number(v, w);
        else if (k == "lambda_cold") c.lambda_cold = json_number(v, w);
        else if (k == "coherence_time") {
            if (!v.is_null()) c.coherence_time = json_number(v, w);
        } else if (k == "T_C") c.T_C = json_number(v, w);
        else if (k == "T_H") c.T_H = json_number(v, w);
        else if (k == "delta_T") {
            if (!v.is_null()) c.delta_T = json_number(v, w);
        } else if (k == "secular_cutoff") c.secular_cutoff = json_number(v, w);
        else if (k == "include_zero_frequency") {
            if (!v.is_boolean()) throw ConfigError(w + ": expected a boolean");
            c.include_zero_frequency = v.get<bool>();
        } else if (k == "full_spectrum") {
            if (!v.is_boolean()) throw ConfigError(w + ": expected a boolean");
            c.full_spectrum = v.get<bool>();
        } else throw ConfigError(w + ": unknown field");
    }
    if (!(c.gamma >= 0.0)) throw ConfigError("bath.gamma: must be >= 0");
    if (!(c.lambda_hot >= 0.0 && c.lambda_hot <= 1.0)) throw ConfigError("bath.lambda_hot: must lie in [0, 1]");
    if (!(c.lambda_cold >= 0.0 && c.lambda_cold <= 1.0)) throw ConfigError("bath.lambda_cold: must lie in [0, 1]");
    if (c.coherence_time && !(*c.coherence_time > 0.0)) throw ConfigError("bath.coherence_time: must be positive");
    if (!(c.T_C > 0.0)) throw ConfigError("bath.T_C: must be positive");
    if (!(c.hot_temperature() > 0.0)) throw ConfigError("bath.T_H: must be positive");
    if (!(c.secular_cutoff >= 0.0)) throw ConfigError("bath.secular_cutoff: must be >= 0");
    return c;
}

} // namespace detail

inline SweepConfig parse_sweep_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected an object");
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (k != "model" && k != "bath" && k != "axes" && k != "coupled" && k != "outputs" && k != "workers")
            throw ConfigError(k + ": unknown field");
    }
    SweepConfig c;
    c.source = j;
    if (!j.contains("model")) throw ConfigError("model: required");
    c.model = j["model"];
    model_from_json(c.model); // validates the template
    c.bath = detail::parse_bath(j.value("bath", json()));

    if (j.contains("axes")) {
        if (!j["axes"].is_array()) throw ConfigError("axes: expected an array");
        for (std::size_t k = 0; k < j["axes"].size(); ++k) {
            const json& a = j["axes"][k];
            const std::string w = "axes[" + std::to_string(k) + "]";
            if (!a.is_object()) throw ConfigError(w + ": expected an object");
            for (const auto& [key, v] : a.items()) {
                (void)v;
                if (key != "path" && key != "name" && key != "values" && key != "linspace" && key != "logspace")
                    throw ConfigError(w + "." + key + ": unknown field");
            }
            Axis ax;
            if (a.contains("path")) {
                if (!a["path"].is_string()) throw ConfigError(w + ".path: expected a string");
                ax.path = a["path"].get<std::string>();
                detail::check_path(ax.path, c.model, w + ".path");
            }
            if (a.contains("name")) {
                if (!a["name"].is_string() || a["name"].get<std::string>().empty()) throw ConfigError(w + ".name: expected a string");
                ax.name = a["name"].get<std::string>();
            } else {
                if (ax.path.empty()) throw ConfigError(w + ": needs a path or a name");
                ax.name = ax.path;
            }
            ax.values = detail::parse_axis_values(a, w);
            for (const Axis& prev : c.axes) {
                if (prev.name == ax.name) throw ConfigError(w + ".name: duplicate axis '" + ax.name + "'");
                if (!ax.path.empty() && prev.path == ax.path) throw ConfigError(w + ".path: duplicate axis path '" + ax.path + "'");
            }
            c.axes.push_back(std::move(ax));
        }
    }
    if (j.contains("coupled")) {
        if (!j["coupled"].is_object()) throw ConfigError("coupled: expected an object");
        for (const auto& [path, src] : j["coupled"].items()) {
            const std::string w = "coupled." + path;
            detail::check_path(path, c.model, w);
            if (!src.is_string()) throw ConfigError(w + ": expected an expression string");
            for (const Axis& a : c.axes)
                if (a.path == path) throw ConfigError(w + ": path is already an axis");
            Coupled cp{path, src.get<std::string>(), nullptr};
            try {
                cp.expression = expr::parse(cp.source);
            } catch (const ConfigError& e) {
                throw ConfigError(w + ": " + e.what());
            }
            std::vector<std::string> vars;
            expr::variables(cp.expression, vars);
            for (const std::string& v : vars) {
                bool ok = false;
                for (const Axis& a : c.axes) ok = ok || a.name == v || a.path == v;
                if (!ok) throw ConfigError(w + ": '" + v + "' is not an axis variable");
            }
            c.coupled.push_back(std::move(cp));
        }
    }
    if (j.contains("outputs")) {
        if (!j["outputs"].is_array()) throw ConfigError("outputs: expected an array");
        for (std::size_t k = 0; k < j["outputs"].size(); ++k) {
            const json& o = j["outputs"][k];
            const std::string w = "outputs[" + std::to_string(k) + "]";
            if (!o.is_string()) throw ConfigError(w + ": expected a string");
            const std::string name = o.get<std::string>();
            const auto& known = known_outputs();
            if (std::find(known.begin(), known.end(), name) == known.end()) throw ConfigError(w + ": unknown output '" + name + "'");
            c.outputs.push_back(name);
        }
    } else {
        c.outputs = {"J_f", "J_r", "R", "C"};
    }
    if (c.outputs.empty()) throw ConfigError("outputs: at least one output is required");
    if (j.contains("workers")) {
        if (!j["workers"].is_number_integer() || j["workers"].get<int>() < 1) throw ConfigError("workers: expected a positive integer");
        c.workers = j["workers"].get<int>();
    }
    return c;
}

// ---------------------------------------------------------------------------
// Table

struct Provenance {
    std::string config_hash;
    std::string version = SPINDIODE_VERSION;
    std::string timestamp;
};

struct SweepTable {
    std::vector<std::string> header; // numeric columns; the error column is implicit and last
    std::vector<std::vector<double>> rows;
    std::vector<std::string> errors; // empty string: point succeeded
    Provenance provenance;

    std::size_t column(const std::string& name) const {
        for (std::size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return k;
        throw ConfigError("table: no column '" + name + "'");
    }
    double at(std::size_t row, const std::string& name) const { return rows.at(row).at(column(name)); }
};

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

/// Hash of the canonical (sorted-key) serialization; the worker count does not enter.
inline std::string config_hash(const json& config) {
    json c = config;
    if (c.is_object()) c.erase("workers");
    return sha256_hex(c.dump());
}

inline std::string utc_timestamp() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline void set_path(json& model, BathConfig& bath, const std::string& path, double v) {
    if (path.rfind("model.", 0) == 0) {
        const std::string f = path.substr(6);
        if (f.rfind("local_fields.", 0) == 0) {
            const int site = std::stoi(f.substr(13));
            const int n = model_from_json(model).n_sites();
            if (site < 1 || site > n) throw ConfigError(path + ": site out of range");
            if (!model.contains("local_fields") || model["local_fields"].empty()) model["local_fields"] = std::vector<double>(n, 0.0);
            model["local_fields"][site - 1] = v;
        } else {
            model[f] = v;
        }
        return;
    }
    const std::string f = path.substr(5);
    if (f == "gamma") bath.gamma = v;
    else if (f == "lambda_hot") bath.lambda_hot = v;
    else if (f == "lambda_cold") bath.lambda_cold = v;
    else if (f == "coherence_time") bath.coherence_time = v;
    else if (f == "T_C") bath.T_C = v;
    else if (f == "T_H") bath.T_H = v;
    else if (f == "delta_T") bath.delta_T = v;
    else if (f == "secular_cutoff") bath.secular_cutoff = v;
}

inline bool needs(const std::vector<std::string>& outs, std::initializer_list<const char*> names) {
    for (const auto& o : outs)
        for (const char* n : names)
            if (o == n) return true;
    return false;
}

} // namespace detail

inline std::vector<std::string> sweep_header(const SweepConfig& c) {
    std::vector<std::string> h;
    for (const Axis& a : c.axes) h.push_back(a.name);
    for (const Coupled& cp : c.coupled) h.push_back(cp.path);
    const int n = model_from_json(c.model).n_sites();
    for (const std::string& o : c.outputs) {
        if (o == "magnetization_f" || o == "magnetization_r") {
            for (int s = 1; s <= n; ++s) h.push_back(o + "_" + std::to_string(s));
        } else {
            h.push_back(o);
        }
    }
    return h;
}

inline std::size_t grid_size(const SweepConfig& c) {
    std::size_t n = 1;
    for (const Axis& a : c.axes) n *= a.values.size();
    return n;
}

/// Evaluates the grid point with row-major index `index`. Fills `row` with every column
/// that could be computed; throws on failure.
inline void evaluate_point(const SweepConfig& c, std::size_t index, std::vector<double>& row) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.assign(sweep_header(c).size(), nan);
    std::size_t col = 0;
    std::map<std::string, double> vars;
    std::vector<std::size_t> idx(c.axes.size());
    std::size_t rem = index;
    for (std::size_t k = c.axes.size(); k-- > 0;) {
        idx[k] = rem % c.axes[k].values.size();
        rem /= c.axes[k].values.size();
    }
    json model = c.model;
    BathConfig bath = c.bath;
    for (std::size_t k = 0; k < c.axes.size(); ++k) {
        const double v = c.axes[k].values[idx[k]];
        row[col++] = v;
        vars[c.axes[k].name] = v;
        if (!c.axes[k].path.empty()) {
            vars[c.axes[k].path] = v;
            detail::set_path(model, bath, c.axes[k].path, v);
        }
    }
    for (const Coupled& cp : c.coupled) {
        const double v = expr::eval(cp.expression, vars);
        row[col++] = v;
        detail::set_path(model, bath, cp.path, v);
    }
    const ModelSpec spec = model_from_json(model);
    const auto& outs = c.outputs;
    std::map<std::string, double> vals;
    std::vector<double> mag_f, mag_r;

    if (detail::needs(outs, {"J_f", "J_r", "R", "C", "continuity", "fidelity_psi_minus", "fidelity_psi_plus", "concurrence",
                             "magnetization_f", "magnetization_r"})) {
        const DiodeEvaluation ev = evaluate_diode(spec, diode_options(bath));
        vals["J_f"] = ev.metrics.J_f;
        vals["J_r"] = ev.metrics.J_r;
        vals["R"] = ev.metrics.R;
        vals["C"] = ev.metrics.C;
        vals["continuity"] = ev.continuity_error();
        if (detail::needs(outs, {"fidelity_psi_minus", "fidelity_psi_plus", "concurrence"})) {
            const Operator r34 = interface_state(spec, ev.reverse.rho);
            vals["fidelity_psi_minus"] = fidelity_pure(r34, bell::psi_minus());
            vals["fidelity_psi_plus"] = fidelity_pure(r34, bell::psi_plus());
            vals["concurrence"] = concurrence(r34);
        }
        mag_f = magnetization_profile(ev.forward.rho);
        mag_r = magnetization_profile(ev.reverse.rho);
    }
    if (detail::needs(outs, {"K_f", "K_r", "R_Q", "heat_balance"})) {
        const HeatMetrics m = evaluate_heat_diode(spec, heat_options(bath));
        vals["K_f"] = m.K_f;
        vals["K_r"] = m.K_r;
        vals["R_Q"] = m.R_Q;
        vals["heat_balance"] = std::max(m.forward.K_balance, m.reverse.K_balance);
    }
    if (detail::needs(outs, {"J_f_jw", "J_r_jw", "R_jw", "continuity_jw"})) {
        const FermionEvaluation ev = fermionic_current_metrics(spec, diode_options(bath));
        vals["J_f_jw"] = ev.metrics.J_f;
        vals["J_r_jw"] = ev.metrics.J_r;
        vals["R_jw"] = ev.metrics.R;
        vals["continuity_jw"] = std::max(ev.continuity_f, ev.continuity_r);
    }
    for (const std::string& o : outs) {
        if (o == "magnetization_f" || o == "magnetization_r") {
            const auto& m = o == "magnetization_f" ? mag_f : mag_r;
            for (double x : m) row[col++] = x;
        } else {
            row[col++] = vals.at(o);
        }
    }
}

inline int resolve_workers(std::optional<int> cli, const SweepConfig& c) {
    if (cli) return std::max(1, *cli);
    if (const char* env = std::getenv("SPINDIODE_WORKERS")) {
        try {
            const int w = std::stoi(env);
            if (w >= 1) return w;
        } catch (const std::exception&) {
        }
        throw ConfigError("SPINDIODE_WORKERS: expected a positive integer");
    }
    return c.workers;
}

/// Row-major grid evaluation on `workers` threads. Failed points keep their axis values,
/// get NaN metrics and an error message.
inline SweepTable run_sweep(const SweepConfig& c, std::optional<int> workers = std::nullopt,
                            const std::function<void(std::size_t, std::size_t)>& progress = {}) {
    SweepTable t;
    t.header = sweep_header(c);
    const std::size_t n = grid_size(c);
    t.rows.assign(n, {});
    t.errors.assign(n, "");
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                evaluate_point(c, i, t.rows[i]);
            } catch (const std::exception& e) {
                t.errors[i] = e.what();
                const std::size_t n_axes = c.axes.size();
                std::vector<double> keep(t.rows[i].begin(), t.rows[i].begin() + std::min(t.rows[i].size(), n_axes + c.coupled.size()));
                t.rows[i].assign(t.header.size(), std::numeric_limits<double>::quiet_NaN());
                std::copy(keep.begin(), keep.end(), t.rows[i].begin());
            }
            const std::size_t d = done.fetch_add(1) + 1;
            if (progress) progress(d, n);
        }
    };
    const int w = std::max(1, std::min<int>(resolve_workers(workers, c), static_cast<int>(n)));
    if (w == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < w; ++k) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    t.provenance.config_hash = config_hash(c.source);
    t.provenance.timestamp = utc_timestamp();
    return t;
}

inline SweepTable run_sweep(const json& config, std::optional<int> workers = std::nullopt) {
    return run_sweep(parse_sweep_config(config), workers);
}

// ---------------------------------------------------------------------------
// Export / import

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    return out + "\"";
}

inline std::string to_csv(const SweepTable& t) {
    std::ostringstream os;
    for (std::size_t k = 0; k < t.header.size(); ++k) os << csv_quote(t.header[k]) << ',';
    os << "error\r\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (double v : t.rows[r]) os << format_number(v) << ',';
        os << csv_quote(t.errors[r]) << "\r\n";
    }
    return os.str();
}

inline json to_json(const SweepTable& t) {
    json j;
    j["provenance"] = {{"config_hash", t.provenance.config_hash}, {"version", t.provenance.version}, {"timestamp", t.provenance.timestamp}};
    j["header"] = t.header;
    json rows = json::array();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        json row = json::object();
        for (std::size_t k = 0; k < t.header.size(); ++k) {
            const double v = t.rows[r][k];
            if (std::isfinite(v)) {
                row[t.header[k]] = v;
            } else {
                row[t.header[k]] = nullptr;
                if (v > 0) row[t.header[k] + "_is_inf"] = true;
                else if (std::isinf(v)) row[t.header[k] + "_is_neg_inf"] = true;
            }
        }
        row["error"] = t.errors[r].empty() ? json(nullptr) : json(t.errors[r]);
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

inline SweepTable table_from_json(const json& j) {
    SweepTable t;
    try {
        const json& p = j.at("provenance");
        t.provenance.config_hash = p.at("config_hash").get<std::string>();
        t.provenance.version = p.at("version").get<std::string>();
        t.provenance.timestamp = p.at("timestamp").get<std::string>();
        t.header = j.at("header").get<std::vector<std::string>>();
        for (const json& row : j.at("rows")) {
            std::vector<double> vals;
            for (const std::string& h : t.header) {
                const json& v = row.at(h);
                if (v.is_null()) {
                    if (row.value(h + "_is_inf", false)) vals.push_back(std::numeric_limits<double>::infinity());
                    else if (row.value(h + "_is_neg_inf", false)) vals.push_back(-std::numeric_limits<double>::infinity());
                    else vals.push_back(std::numeric_limits<double>::quiet_NaN());
                } else {
                    vals.push_back(v.get<double>());
                }
            }
            t.rows.push_back(std::move(vals));
            t.errors.push_back(row.at("error").is_null() ? "" : row["error"].get<std::string>());
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("table json: ") + e.what());
    }
    return t;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw Error("write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot read '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

inline void export_table(const SweepTable& t, const std::string& path, const std::string& format) {
    if (t.rows.empty()) throw ConfigError("export: table is empty");
    if (format == "csv") write_file(path, to_csv(t));
    else if (format == "json") write_file(path, to_json(t).dump(2) + "\n");
    else throw ConfigError("format: expected csv or json");
}

} // namespace spindiode
