#pragma once

// Closed-form covering parameters for given model coefficients and a
// chosen noise level kappa2_star.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftcert/fields/model.hpp"

namespace driftcert {

struct CoverParams {
    double sigma = 0.0;
    double delta = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
    double Dcap = 0.0;
    double Ncap = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double C3 = 0.0;
    double C4 = 0.0;
    double C5 = 0.0;
    double kappa2_star = 0.0;
};

inline CoverParams appendix_params(const ModelParams& p, double kappa2_star) {
    if (!(p.alpha2 > p.alpha1)) throw std::invalid_argument("covering needs alpha2 > alpha1");
    if (!(kappa2_star > 0.0)) throw std::invalid_argument("kappa2_star must be > 0");
    CoverParams c;
    c.kappa2_star = kappa2_star;
    c.sigma = (p.alpha1 + p.alpha2) / (2.0 * p.alpha2);
    c.delta = kappa2_star / (8.0 * p.alpha1);
    c.beta = (2.0 + c.sigma) * c.delta;
    c.gamma = (1.0 - c.sigma) * c.delta;
    c.eta = p.alpha2 / 2.0;
    const double abs_a2 = std::abs(p.a2);
    c.Dcap = 1.0 + (p.alpha2 + 2.0 * abs_a2) * (p.alpha2 - p.alpha1) / p.alpha2;
    c.Ncap = 1.0 + 4.0 * abs_a2 / p.alpha2;
    const double Dd = std::pow(c.Dcap, c.delta);
    c.C1 = 2.0;
    c.C2 = 1.0;
    c.C3 = 1.0 / (2.0 * Dd);
    c.C4 = 1.0 / (3.0 * c.Ncap * Dd);
    c.C5 = 1.0 / (4.0 * Dd);
    return c;
}

// c was computed from p (for some kappa2_star).
inline bool consistent(const ModelParams& p, const CoverParams& c) {
    if (!(p.alpha2 > p.alpha1) || !(c.kappa2_star > 0.0)) return false;
    const CoverParams ref = appendix_params(p, c.kappa2_star);
    return ref.sigma == c.sigma && ref.delta == c.delta && ref.Dcap == c.Dcap && ref.Ncap == c.Ncap &&
           ref.C3 == c.C3 && ref.C4 == c.C4;
}

// Left-hand side of (alpha1 - sigma alpha2) + kappa2 sigma (2 sigma delta + 1) < 0.
inline double phi2_rate(const ModelParams& p, const CoverParams& c) {
    return (p.alpha1 - c.sigma * p.alpha2) + c.kappa2_star * c.sigma * (2.0 * c.sigma * c.delta + 1.0);
}

// The two closed-form selection conditions on kappa2.
inline bool closed_form_conditions(const ModelParams& p, const CoverParams& c) {
    const bool exponents = c.delta > 0.0 && c.delta < 0.5 && c.gamma > 0.0 && c.gamma < 0.5;
    return exponents && phi2_rate(p, c) < 0.0;
}

// Every stated equality and inequality; returns the violated ones.
inline std::vector<std::string> appendix_violations(const ModelParams& p, const CoverParams& c) {
    std::vector<std::string> bad;
    auto need = [&bad](bool ok, const char* what) {
        if (!ok) bad.emplace_back(what);
    };
    const double abs_a2 = std::abs(p.a2);
    const double Dd = std::pow(c.Dcap, c.delta);
    need(c.sigma == (p.alpha1 + p.alpha2) / (2.0 * p.alpha2), "sigma formula");
    need(c.sigma > p.alpha1 / p.alpha2 && c.sigma < 1.0, "sigma in (alpha1/alpha2, 1)");
    need(c.delta == c.kappa2_star / (8.0 * p.alpha1), "delta formula");
    need(c.beta == (2.0 + c.sigma) * c.delta, "beta formula");
    need(c.gamma == (1.0 - c.sigma) * c.delta, "gamma formula");
    need(c.eta == p.alpha2 / 2.0, "eta formula");
    need(c.Dcap > std::max(1.0, (p.alpha2 + 2.0 * abs_a2) * (1.0 - c.sigma)), "D > max(1, (alpha2+2|a2|)(1-sigma))");
    need(c.Ncap > std::max(1.0, 4.0 * abs_a2 / p.alpha2) || (abs_a2 == 0.0 && c.Ncap == 1.0),
         "N > max(1, 4|a2|/alpha2)");
    need(c.C1 > c.C2, "C1 > C2");
    need(c.C3 < c.C2 / Dd, "C3 < C2 / D^delta");
    need(c.Ncap * c.C4 < c.C3, "N C4 < C3");
    need(c.Ncap * c.C4 > c.C5, "N C4 > C5");
    need(closed_form_conditions(p, c), "delta, gamma in (0,1/2) and phi2 rate < 0");
    return bad;
}

}  // namespace driftcert
