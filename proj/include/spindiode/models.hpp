// Declarative descriptions of every diode Hamiltonian variant

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "spindiode/error.hpp"
#include "spindiode/spinops.hpp"

namespace spindiode {

enum class Variant {
    Diode,
    DiodePerturbed,
    FieldVariant_H1,
    SignVariant_H2,
    Heat_HQ,
    Extended_mXX,
    Extended_XXm,
    Extended_XXZm,
    ShadowCorrected,
    LinearReference,
};

inline constexpr std::array<std::pair<Variant, std::string_view>, 10> kVariantNames{{
    {Variant::Diode, "Diode"},
    {Variant::DiodePerturbed, "DiodePerturbed"},
    {Variant::FieldVariant_H1, "FieldVariant_H1"},
    {Variant::SignVariant_H2, "SignVariant_H2"},
    {Variant::Heat_HQ, "Heat_HQ"},
    {Variant::Extended_mXX, "Extended_mXX"},
    {Variant::Extended_XXm, "Extended_XXm"},
    {Variant::Extended_XXZm, "Extended_XXZm"},
    {Variant::ShadowCorrected, "ShadowCorrected"},
    {Variant::LinearReference, "LinearReference"},
}};

inline std::string_view to_string(Variant v) {
    for (const auto& [var, name] : kVariantNames)
        if (var == v) return name;
    return "?";
}

inline Variant variant_from_string(std::string_view s) {
    for (const auto& [var, name] : kVariantNames)
        if (name == s) return var;
    throw ConfigError("variant: unknown variant '" + std::string(s) + "'");
}

/// Parameters of one Hamiltonian. Energies are in units of J; J itself sets the scale.
struct ModelSpec {
    Variant variant = Variant::Diode;
    double J = 1.0;
    double Delta = 0.0;
    double delta = 0.0;
    double J34 = 1.0;
    double h = 0.0;
    double omega_global = 0.0;
    double h3 = 0.0;
    double h4 = 0.0;
    double delta_prime = 0.0;
    double A = 0.1;
    std::optional<double> omega_drive; // defaults to Delta + 1.2
    double gamma_S = 1.0;
    std::vector<double> local_fields;  // extra h_n sigma_z^(n), DiodePerturbed only

    int n_sites() const {
        switch (variant) {
        case Variant::LinearReference: return 5;
        case Variant::Extended_mXX:
        case Variant::Extended_XXm:
        case Variant::Extended_XXZm:
        case Variant::ShadowCorrected: return 7;
        default: return 6;
        }
    }

    double drive_detuning() const { return omega_drive.value_or(Delta + 1.2); }

    bool operator==(const ModelSpec&) const = default;
};

/// Sites coupled to the left and right baths.
inline std::pair<int, int> bath_sites(const ModelSpec& spec) {
    switch (spec.variant) {
    case Variant::LinearReference: return {1, 5};
    case Variant::Extended_mXX:
    case Variant::Extended_XXm:
    case Variant::Extended_XXZm: return {1, 7};
    default: return {1, 6};
    }
}

/// Bonds on which the boundary currents are measured (left bond, right bond).
inline std::pair<std::pair<int, int>, std::pair<int, int>> current_bonds(const ModelSpec& spec) {
    auto [l, r] = bath_sites(spec);
    return {{l, l + 1}, {r - 1, r}};
}

inline int shadow_site(const ModelSpec& spec) {
    return spec.variant == Variant::ShadowCorrected ? 7 : 0;
}

// ---------------------------------------------------------------------------
// Validation

inline void validate(const ModelSpec& s) {
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError(field + ": " + why);
    };
    const double vals[] = {s.J, s.Delta, s.delta, s.J34, s.h, s.omega_global, s.h3, s.h4, s.delta_prime, s.A, s.gamma_S};
    for (double v : vals)
        if (!std::isfinite(v)) fail("model", "non-finite parameter");
    if (!(s.J > 0.0)) fail("J", "must be positive");
    if (s.gamma_S < 0.0) fail("gamma_S", "must be non-negative");

    const ModelSpec def{};
    const bool uses_delta_z = s.variant != Variant::FieldVariant_H1 && s.variant != Variant::Heat_HQ;
    const bool uses_h = s.variant == Variant::FieldVariant_H1 || s.variant == Variant::SignVariant_H2 ||
                        s.variant == Variant::Heat_HQ || s.variant == Variant::LinearReference;
    const bool uses_omega = s.variant == Variant::Heat_HQ || s.variant == Variant::LinearReference;
    const bool perturbed = s.variant == Variant::DiodePerturbed;
    const bool shadow = s.variant == Variant::ShadowCorrected;
    const std::string tag = " not used by variant " + std::string(to_string(s.variant));

    if (!uses_delta_z && s.Delta != 0.0) fail("Delta", "must be 0 (ZZ anisotropy" + tag + ")");
    if (!uses_h && s.h != def.h) fail("h", "local field" + tag);
    if (!uses_omega && s.omega_global != def.omega_global) fail("omega_global", "uniform field" + tag);
    if (!perturbed) {
        if (s.h3 != 0.0) fail("h3", "perturbation" + tag);
        if (s.h4 != 0.0) fail("h4", "perturbation" + tag);
        if (s.delta_prime != 0.0) fail("delta_prime", "perturbation" + tag);
        if (!s.local_fields.empty()) fail("local_fields", "perturbation" + tag);
    } else if (!s.local_fields.empty() && static_cast<int>(s.local_fields.size()) != s.n_sites()) {
        fail("local_fields", "needs exactly " + std::to_string(s.n_sites()) + " entries");
    }
    if (!shadow) {
        if (s.A != def.A) fail("A", "drive amplitude" + tag);
        if (s.omega_drive) fail("omega_drive", "drive detuning" + tag);
        if (s.gamma_S != def.gamma_S) fail("gamma_S", "shadow decay" + tag);
    }
    if (s.variant == Variant::LinearReference) {
        if (s.delta != 0.0) fail("delta", "spin 3 is absent in the linear reference");
        if (s.J34 != def.J34) fail("J34", "spin 3 is absent in the linear reference");
    }
}

// ---------------------------------------------------------------------------
// Term representation

enum class TermKind {
    XX,      // sigma_x sigma_x + sigma_y sigma_y
    ZZ,      // sigma_z sigma_z
    Z,       // sigma_z (single site, j unused)
    PairFlip // sigma_+ sigma_+ + sigma_- sigma_-
};

struct Term {
    TermKind kind;
    int i;
    int j; // 0 for single-site terms
    double coeff;
};

/// Hamiltonian kept as a list of local terms so it can be restricted to a subset of sites.
struct PauliSum {
    int n_sites = 0;
    std::vector<Term> terms;

    void add(TermKind kind, int i, int j, double coeff) {
        if (coeff != 0.0) terms.push_back({kind, i, j, coeff});
    }

    Operator to_operator() const {
        const Eigen::Index dim = dim_for_sites(n_sites);
        Operator h = Operator::Zero(dim, dim);
        for (const Term& t : terms) {
            switch (t.kind) {
            case TermKind::XX: h += t.coeff * exchange_xx(n_sites, t.i, t.j); break;
            case TermKind::ZZ: h += t.coeff * coupling_zz(n_sites, t.i, t.j); break;
            case TermKind::Z: h += t.coeff * sigma_z(n_sites, t.i); break;
            case TermKind::PairFlip:
                check_pair(n_sites, t.i, t.j);
                h += t.coeff * (sigma_plus(n_sites, t.i) * sigma_plus(n_sites, t.j) +
                                sigma_minus(n_sites, t.i) * sigma_minus(n_sites, t.j));
                break;
            }
        }
        return h;
    }
};

namespace detail {

// Couplings of the six-spin diode, sites offset by `o`. `sign23`/`sign35` flip the
// corresponding exchange terms (used by the sign variant).
inline void add_diode_core(PauliSum& h, const ModelSpec& s, int o, double sign23 = 1.0, double sign35 = 1.0) {
    const double J = s.J;
    h.add(TermKind::XX, o + 1, o + 2, J);
    h.add(TermKind::XX, o + 2, o + 3, sign23 * (1.0 + s.delta) * J);
    h.add(TermKind::XX, o + 2, o + 4, J);
    h.add(TermKind::XX, o + 3, o + 4, s.J34 * J);
    h.add(TermKind::XX, o + 3, o + 5, sign35 * J);
    h.add(TermKind::XX, o + 4, o + 5, J);
    h.add(TermKind::XX, o + 5, o + 6, J);
}

} // namespace detail

inline PauliSum build_terms(const ModelSpec& s) {
    validate(s);
    PauliSum h;
    h.n_sites = s.n_sites();
    const double J = s.J;
    switch (s.variant) {
    case Variant::Diode:
        detail::add_diode_core(h, s, 0);
        h.add(TermKind::ZZ, 1, 2, s.Delta * J);
        break;
    case Variant::DiodePerturbed:
        detail::add_diode_core(h, s, 0);
        h.add(TermKind::ZZ, 1, 2, s.Delta * J);
        h.add(TermKind::Z, 3, 0, s.h3 * J);
        h.add(TermKind::Z, 4, 0, s.h4 * J);
        h.add(TermKind::XX, 4, 5, s.delta_prime * J);
        for (std::size_t k = 0; k < s.local_fields.size(); ++k)
            h.add(TermKind::Z, static_cast<int>(k) + 1, 0, s.local_fields[k] * J);
        break;
    case Variant::FieldVariant_H1:
        detail::add_diode_core(h, s, 0);
        h.add(TermKind::Z, 1, 0, s.h * J);
        h.add(TermKind::Z, 2, 0, s.h * J);
        break;
    case Variant::SignVariant_H2:
        detail::add_diode_core(h, s, 0, -1.0, -1.0);
        h.add(TermKind::Z, 1, 0, s.h * J);
        h.add(TermKind::Z, 2, 0, s.h * J);
        h.add(TermKind::ZZ, 1, 2, s.Delta * J);
        break;
    case Variant::Heat_HQ:
        detail::add_diode_core(h, s, 0);
        h.add(TermKind::Z, 1, 0, s.h * J);
        h.add(TermKind::Z, 2, 0, s.h * J);
        for (int k = 1; k <= 6; ++k) h.add(TermKind::Z, k, 0, s.omega_global * J);
        break;
    case Variant::Extended_mXX:
        detail::add_diode_core(h, s, 0);
        h.add(TermKind::ZZ, 1, 2, s.Delta * J);
        h.add(TermKind::XX, 6, 7, J);
        break;
    case Variant::Extended_XXm:
        h.add(TermKind::XX, 1, 2, J);
        detail::add_diode_core(h, s, 1);
        h.add(TermKind::ZZ, 2, 3, s.Delta * J);
        break;
    case Variant::Extended_XXZm:
        h.add(TermKind::XX, 1, 2, J);
        h.add(TermKind::ZZ, 1, 2, s.Delta * J);
        detail::add_diode_core(h, s, 1);
        h.add(TermKind::ZZ, 2, 3, s.Delta * J);
        break;
    case Variant::ShadowCorrected:
        // Rotating-frame form: the drive on spin 3 and the shadow spin (site 7) is static.
        detail::add_diode_core(h, s, 0);
        h.add(TermKind::ZZ, 1, 2, s.Delta * J);
        h.add(TermKind::PairFlip, 3, 7, s.A * J);
        h.add(TermKind::Z, 7, 0, -s.drive_detuning() * J);
        break;
    case Variant::LinearReference:
        // Diode with spin 3 removed; old sites (1,2,4,5,6) become (1..5).
        h.add(TermKind::XX, 1, 2, J);
        h.add(TermKind::XX, 2, 3, J);
        h.add(TermKind::XX, 3, 4, J);
        h.add(TermKind::XX, 4, 5, J);
        h.add(TermKind::ZZ, 1, 2, s.Delta * J);
        h.add(TermKind::Z, 1, 0, s.h * J);
        h.add(TermKind::Z, 2, 0, s.h * J);
        for (int k = 1; k <= 5; ++k) h.add(TermKind::Z, k, 0, s.omega_global * J);
        break;
    }
    return h;
}

inline Operator build_hamiltonian(const ModelSpec& s) { return build_terms(s).to_operator(); }

/// Terms fully supported on the contiguous site list, re-indexed from 1.
inline Operator restrict_to_sites(const PauliSum& h, std::span<const int> sites) {
    if (sites.empty()) throw DimensionError("restrict_to_sites: empty site list");
    for (std::size_t k = 0; k < sites.size(); ++k) {
        check_site(h.n_sites, sites[k]);
        if (k > 0 && sites[k] != sites[k - 1] + 1) throw DimensionError("restrict_to_sites: sites must be contiguous");
    }
    const int first = sites.front();
    const int last = sites.back();
    auto inside = [&](int s) { return s >= first && s <= last; };
    PauliSum sub;
    sub.n_sites = static_cast<int>(sites.size());
    for (const Term& t : h.terms) {
        const bool single = t.kind == TermKind::Z;
        if (!inside(t.i) || (!single && !inside(t.j))) continue;
        sub.terms.push_back({t.kind, t.i - first + 1, single ? 0 : t.j - first + 1, t.coeff});
    }
    return sub.to_operator();
}

inline Operator restrict_to_sites(const PauliSum& h, std::initializer_list<int> sites) {
    return restrict_to_sites(h, std::span<const int>(sites.begin(), sites.size()));
}

// ---------------------------------------------------------------------------
// Critical lines

/// Interface coupling of maximal reverse-current suppression for the ZZ-gapped diode.
inline double critical_j34(double Delta) {
    if (Delta < 0.0) return -Delta + 1.3;
    return -(Delta + 1.3);
}

/// Same line for the field-gapped heat diode (and field variant H1).
inline double critical_j34_heat(double h) { return h + 1.3; }

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const ModelSpec& s) {
    nlohmann::json j;
    j["variant"] = std::string(to_string(s.variant));
    j["J"] = s.J;
    j["Delta"] = s.Delta;
    j["delta"] = s.delta;
    j["J34"] = s.J34;
    j["h"] = s.h;
    j["omega_global"] = s.omega_global;
    j["h3"] = s.h3;
    j["h4"] = s.h4;
    j["delta_prime"] = s.delta_prime;
    j["A"] = s.A;
    if (s.omega_drive) j["omega_drive"] = *s.omega_drive;
    else j["omega_drive"] = nullptr;
    j["gamma_S"] = s.gamma_S;
    j["local_fields"] = s.local_fields;
    j["n_sites"] = s.n_sites();
    return j;
}

/// Parses a model document; unknown keys and type mismatches are ConfigErrors naming the key.
inline ModelSpec model_from_json(const nlohmann::json& j, const std::string& prefix = "model") {
    if (!j.is_object()) throw ConfigError(prefix + ": expected an object");
    ModelSpec s;
    auto number = [&](const std::string& key) -> double {
        const auto& v = j.at(key);
        if (!v.is_number()) throw ConfigError(prefix + "." + key + ": expected a number");
        return v.get<double>();
    };
    std::optional<int> declared_sites;
    if (j.contains("variant")) {
        if (!j["variant"].is_string()) throw ConfigError(prefix + ".variant: expected a string");
        try {
            s.variant = variant_from_string(j["variant"].get<std::string>());
        } catch (const ConfigError& e) {
            throw ConfigError(prefix + "." + e.what());
        }
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "variant") continue;
        if (key == "J") s.J = number(key);
        else if (key == "Delta") s.Delta = number(key);
        else if (key == "delta") s.delta = number(key);
        else if (key == "J34") s.J34 = number(key);
        else if (key == "h") s.h = number(key);
        else if (key == "omega_global") s.omega_global = number(key);
        else if (key == "h3") s.h3 = number(key);
        else if (key == "h4") s.h4 = number(key);
        else if (key == "delta_prime") s.delta_prime = number(key);
        else if (key == "A") s.A = number(key);
        else if (key == "gamma_S") s.gamma_S = number(key);
        else if (key == "omega_drive") {
            if (!value.is_null()) s.omega_drive = number(key);
        } else if (key == "local_fields") {
            if (!value.is_array()) throw ConfigError(prefix + ".local_fields: expected an array");
            s.local_fields.clear();
            for (const auto& x : value) {
                if (!x.is_number()) throw ConfigError(prefix + ".local_fields: expected numbers");
                s.local_fields.push_back(x.get<double>());
            }
        } else if (key == "n_sites") {
            if (!value.is_number_integer()) throw ConfigError(prefix + ".n_sites: expected an integer");
            declared_sites = value.get<int>();
        } else {
            throw ConfigError(prefix + "." + key + ": unknown field");
        }
    }
    if (declared_sites && *declared_sites != s.n_sites()) {
        throw ConfigError(prefix + ".n_sites: variant " + std::string(to_string(s.variant)) + " has " +
                          std::to_string(s.n_sites()) + " sites, not " + std::to_string(*declared_sites));
    }
    try {
        validate(s);
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + "." + e.what());
    }
    return s;
}

} // namespace spindiode
