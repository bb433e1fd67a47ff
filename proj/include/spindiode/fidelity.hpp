// State overlaps and distances between density matrices

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "spindiode/error.hpp"
#include "spindiode/spinops.hpp"

namespace spindiode {

/// Square root of a Hermitian PSD matrix; eigenvalues down to -clip are set to zero.
inline Operator psd_sqrt(const Operator& m, double clip = 1e-12) {
    const Operator herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> es(herm);
    if (es.info() != Eigen::Success) throw NumericalError("psd_sqrt: eigensolver failed");
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -clip) throw NumericalError("psd_sqrt: matrix has eigenvalue " + std::to_string(ev(i)));
        ev(i) = std::sqrt(std::max(ev(i), 0.0));
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

/// <psi| rho |psi>.
inline double fidelity_pure(const Operator& rho, const StateVector& psi) {
    if (rho.rows() != psi.size()) throw DimensionError("fidelity_pure: dimension mismatch");
    return (psi.adjoint() * rho * psi)(0, 0).real();
}

/// Uhlmann fidelity (tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2.
inline double fidelity_mixed(const Operator& rho, const Operator& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) throw DimensionError("fidelity_mixed: dimension mismatch");
    const Operator s = psd_sqrt(sigma, 1e-8);
    psd_sqrt(rho, 1e-8); // validates rho
    const Operator inner = s * rho * s;
    Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
    // eigenvalues below the solver's roundoff would add O(sqrt(eps)) each
    const auto& ev = es.eigenvalues();
    const double floor = static_cast<double>(ev.size()) * std::numeric_limits<double>::epsilon() * ev.cwiseAbs().maxCoeff();
    double tr = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > floor) tr += std::sqrt(ev(i));
    return tr * tr;
}

/// (1/2) ||rho - sigma||_1 for Hermitian arguments.
inline double trace_distance(const Operator& rho, const Operator& sigma) {
    const Operator d = rho - sigma;
    Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double min_eigenvalue(const Operator& m) {
    Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace spindiode
