#include <gtest/gtest.h>

#include "helpers.hpp"
#include "spindiode/models.hpp"

using namespace spindiode;
using testutil::max_abs;

namespace {

ModelSpec diode(double Delta, double delta, double J34) {
    ModelSpec s;
    s.Delta = Delta;
    s.delta = delta;
    s.J34 = J34;
    return s;
}

ModelSpec of(Variant v) {
    ModelSpec s;
    s.variant = v;
    return s;
}

} // namespace

TEST(Models, SiteCounts) {
    EXPECT_EQ(of(Variant::LinearReference).n_sites(), 5);
    EXPECT_EQ(of(Variant::Diode).n_sites(), 6);
    EXPECT_EQ(of(Variant::Heat_HQ).n_sites(), 6);
    EXPECT_EQ(of(Variant::Extended_XXZm).n_sites(), 7);
    EXPECT_EQ(of(Variant::ShadowCorrected).n_sites(), 7);
}

TEST(Models, AllVariantsHermitianAndConserveMagnetization) {
    for (const auto& [v, name] : kVariantNames) {
        ModelSpec s = of(v);
        s.delta = v == Variant::LinearReference ? 0.0 : 0.03;
        if (v != Variant::FieldVariant_H1 && v != Variant::Heat_HQ) s.Delta = 2.0;
        if (v == Variant::FieldVariant_H1 || v == Variant::SignVariant_H2 || v == Variant::Heat_HQ) s.h = 1.5;
        const Operator h = build_hamiltonian(s);
        EXPECT_EQ(h.rows(), dim_for_sites(s.n_sites())) << name;
        EXPECT_LT(hermiticity_error(h), 1e-12) << name;
        if (v == Variant::ShadowCorrected) continue; // the pair-flip drive changes magnetization by 2
        const Operator sz = total_sigma_z(s.n_sites());
        EXPECT_LT(max_abs(h * sz - sz * h), 1e-12) << name;
    }
}

TEST(Models, DiodeTermByTerm) {
    const ModelSpec s = diode(3.0, 0.2, -4.0);
    Operator ref = exchange_xx(6, 1, 2) + 1.2 * exchange_xx(6, 2, 3) + exchange_xx(6, 2, 4) - 4.0 * exchange_xx(6, 3, 4) +
                   exchange_xx(6, 3, 5) + exchange_xx(6, 4, 5) + exchange_xx(6, 5, 6) + 3.0 * coupling_zz(6, 1, 2);
    EXPECT_LT(max_abs(build_hamiltonian(s) - ref), 1e-13);
}

TEST(Models, EnergyScaleJ) {
    ModelSpec s = diode(3.0, 0.2, -4.0);
    const Operator h1 = build_hamiltonian(s);
    s.J = 2.5;
    EXPECT_LT(max_abs(build_hamiltonian(s) - 2.5 * h1), 1e-12);
}

TEST(Models, EigenstateOfFirstFourSpins) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const StateVector psi = kron_all({down(), down(), bell::psi_minus()});
    for (int k = 0; k < 20; ++k) {
        const double D = u(rng) + 3.0, d = 0.1 * u(rng), j34 = u(rng) - 3.0;
        const Operator h = restrict_to_sites(build_terms(diode(D, d, j34)), {1, 2, 3, 4});
        const StateVector expect = std::sqrt(2.0) * d * product_state("dudd") + (D - 2.0 * j34) * psi;
        EXPECT_LT((h * psi - expect).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Models, RestrictionContents) {
    const PauliSum t = build_terms(diode(2.0, 0.1, -3.0));
    const Operator h14 = restrict_to_sites(t, {1, 2, 3, 4});
    const Operator ref = exchange_xx(4, 1, 2) + 1.1 * exchange_xx(4, 2, 3) + exchange_xx(4, 2, 4) - 3.0 * exchange_xx(4, 3, 4) +
                         2.0 * coupling_zz(4, 1, 2);
    EXPECT_LT(max_abs(h14 - ref), 1e-13);
    EXPECT_LT(max_abs(restrict_to_sites(t, {1, 2, 3, 4, 5, 6}) - t.to_operator()), 1e-13);
}

TEST(Models, InterfaceStateOnSpinsTwoToFive) {
    const double d = 0.07, j34 = -2.5;
    const Operator h = restrict_to_sites(build_terms(diode(4.0, d, j34)), {2, 3, 4, 5});
    const StateVector psi = kron_all({down(), bell::psi_minus(), up()});
    const StateVector expect = -2.0 * j34 * psi + std::sqrt(2.0) * d * product_state("uddu");
    EXPECT_LT((h * psi - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Models, DestructiveInterference) {
    const StateVector psi = kron_all({down(), bell::psi_minus(), up()});
    const StateVector out = (exchange_xx(4, 3, 4) + exchange_xx(4, 2, 4)) * psi;
    EXPECT_LT(out.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Models, SignVariantClosesOnPsiPlus) {
    // with the 3-5 exchange flipped, X45 - X35 annihilates |d Psi+ u>
    const StateVector psi = kron_all({down(), bell::psi_plus(), up()});
    const StateVector out = (exchange_xx(4, 3, 4) - exchange_xx(4, 2, 4)) * psi;
    EXPECT_LT(out.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Models, PermutationSymmetryAtZeroAsymmetry) {
    const Operator p = swap_sites(6, 3, 4);
    const Operator h0 = build_hamiltonian(diode(0.0, 0.0, 1.0));
    EXPECT_LT(max_abs(h0 * p - p * h0), 1e-12);
    const Operator h5 = build_hamiltonian(diode(5.0, 0.0, -6.3));
    EXPECT_LT(max_abs(h5 * p - p * h5), 1e-12);
    const Operator hd = build_hamiltonian(diode(0.0, 0.1, 1.0));
    EXPECT_GT(max_abs(hd * p - p * hd), 1e-3);
}

TEST(Models, CriticalLines) {
    EXPECT_DOUBLE_EQ(critical_j34(5.0), -6.3);
    EXPECT_DOUBLE_EQ(critical_j34(-5.0), 6.3);
    EXPECT_DOUBLE_EQ(critical_j34(0.0), -1.3);
    EXPECT_DOUBLE_EQ(critical_j34_heat(5.0), 6.3);
    EXPECT_DOUBLE_EQ(critical_j34_heat(0.0), 1.3);
    EXPECT_DOUBLE_EQ(critical_j34_heat(10.0), 11.3);
}

TEST(Models, LinearReferenceDropsSpinThree) {
    ModelSpec s = of(Variant::LinearReference);
    s.Delta = 2.0;
    const Operator ref = exchange_xx(5, 1, 2) + exchange_xx(5, 2, 3) + exchange_xx(5, 3, 4) + exchange_xx(5, 4, 5) +
                         2.0 * coupling_zz(5, 1, 2);
    EXPECT_LT(max_abs(build_hamiltonian(s) - ref), 1e-13);
    EXPECT_EQ(bath_sites(s), std::make_pair(1, 5));
}

TEST(Models, HeatVariantFields) {
    ModelSpec s = of(Variant::Heat_HQ);
    s.h = 2.0;
    s.omega_global = 0.5;
    s.J34 = 3.3;
    s.delta = 0.01;
    ModelSpec core = diode(0.0, 0.01, 3.3);
    Operator ref = build_hamiltonian(core) + 2.0 * (sigma_z(6, 1) + sigma_z(6, 2)) + 0.5 * total_sigma_z(6);
    EXPECT_LT(max_abs(build_hamiltonian(s) - ref), 1e-12);
}

TEST(Models, ShadowDefaults) {
    ModelSpec s = of(Variant::ShadowCorrected);
    s.Delta = 5.0;
    EXPECT_DOUBLE_EQ(s.drive_detuning(), 6.2);
    EXPECT_EQ(shadow_site(s), 7);
    EXPECT_EQ(shadow_site(of(Variant::Diode)), 0);
    const Operator h = build_hamiltonian(s);
    // the drive couples |d..d> (site 3 down, shadow down) to both flipped
    const StateVector a = product_state("ddddddd");
    const StateVector b = product_state("ddudddu");
    EXPECT_NEAR(std::abs(b.dot(h * a)), 0.1, 1e-14);
}

TEST(Models, Validation) {
    ModelSpec s = of(Variant::Heat_HQ);
    s.Delta = 1.0;
    EXPECT_THROW(validate(s), ConfigError);
    s = of(Variant::Diode);
    s.J = 0.0;
    EXPECT_THROW(validate(s), ConfigError);
    s = of(Variant::Diode);
    s.h3 = 0.1;
    EXPECT_THROW(validate(s), ConfigError);
    s = of(Variant::DiodePerturbed);
    s.local_fields = {0.1, 0.2};
    EXPECT_THROW(validate(s), ConfigError);
}

TEST(Models, JsonRoundTrip) {
    ModelSpec s = of(Variant::DiodePerturbed);
    s.Delta = 4.0;
    s.delta = 0.03;
    s.J34 = -5.3;
    s.h3 = 0.2;
    s.local_fields = {0.1, 0, 0, 0, 0, -0.1};
    EXPECT_EQ(model_from_json(to_json(s)), s);
    ModelSpec sh = of(Variant::ShadowCorrected);
    sh.omega_drive = 6.0;
    EXPECT_EQ(model_from_json(to_json(sh)), sh);
}

TEST(Models, JsonErrorsNameTheField) {
    auto msg = [](const nlohmann::json& j) {
        try {
            model_from_json(j);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(msg({{"variant", "Diode"}, {"Delta", "x"}}).find("model.Delta"), std::string::npos);
    EXPECT_NE(msg({{"variant", "Diode"}, {"bogus", 1}}).find("model.bogus"), std::string::npos);
    EXPECT_NE(msg({{"variant", "Nope"}}).find("model.variant"), std::string::npos);
    EXPECT_NE(msg({{"variant", "Diode"}, {"n_sites", 7}}).find("n_sites"), std::string::npos);
}
