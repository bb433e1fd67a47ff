// Jordan-Wigner fermion operators on an n-site spin register

#pragma once

#include <vector>

#include "spindiode/spinops.hpp"

namespace spindiode {

struct FermionOps {
    int n_sites = 0;
    std::vector<Operator> a;      // annihilators a_1..a_n (index 0 is site 1)
    std::vector<Operator> number; // n_k = a_k^dag a_k

    const Operator& annihilator(int site) const { return a.at(site - 1); }
    Operator creator(int site) const { return a.at(site - 1).adjoint(); }
    const Operator& occupation(int site) const { return number.at(site - 1); }
};

/// exp(i pi sum_{k<site} n_k), built as a diagonal of (-1)^(occupied sites left of `site`).
inline Operator jw_string(int n_sites, int site) {
    check_site(n_sites, site);
    const Eigen::Index dim = dim_for_sites(n_sites);
    Operator s = Operator::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        int count = 0;
        for (int k = 1; k < site; ++k)
            if (b & site_mask(n_sites, k)) ++count;
        s(b, b) = (count % 2) ? -1.0 : 1.0;
    }
    return s;
}

/// a_n with the string attached so that sigma_+^(n) = a_n^dag exp(i pi sum_{k<n} n_k).
inline FermionOps jw_fermions(int n_sites) {
    if (n_sites < 1) throw DimensionError("jw_fermions: n_sites must be >= 1");
    FermionOps ops;
    ops.n_sites = n_sites;
    ops.a.reserve(n_sites);
    ops.number.reserve(n_sites);
    for (int n = 1; n <= n_sites; ++n) {
        Operator an = jw_string(n_sites, n) * sigma_minus(n_sites, n);
        ops.number.push_back(an.adjoint() * an);
        ops.a.push_back(std::move(an));
    }
    return ops;
}

/// (-1)^{n_k} = 1 - 2 n_k.
inline Operator parity(const FermionOps& ops, int site) {
    const Operator& nk = ops.occupation(site);
    return Operator::Identity(nk.rows(), nk.cols()) - 2.0 * nk;
}

/// Hopping K_mn = 2 (a_m^dag a_n + a_n^dag a_m).
inline Operator hopping(const FermionOps& ops, int m, int n) {
    const Operator& am = ops.annihilator(m);
    const Operator& an = ops.annihilator(n);
    return 2.0 * (am.adjoint() * an + an.adjoint() * am);
}

} // namespace spindiode
