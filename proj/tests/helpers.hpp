#pragma once

#include <random>

#include "spindiode/spinops.hpp"

namespace testutil {

using spindiode::Operator;
using spindiode::StateVector;

inline Operator random_matrix(Eigen::Index d, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Operator m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = {g(rng), g(rng)};
    return m;
}

inline Operator random_density(Eigen::Index d, std::mt19937& rng) {
    const Operator a = random_matrix(d, rng);
    Operator rho = a * a.adjoint();
    return rho / rho.trace().real();
}

inline StateVector random_state(Eigen::Index d, std::mt19937& rng) {
    std::normal_distribution<double> g;
    StateVector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = {g(rng), g(rng)};
    return v.normalized();
}

inline double max_abs(const Operator& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

} // namespace testutil
