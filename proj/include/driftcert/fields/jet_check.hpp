#pragma once

// Finite-difference cross-check of analytic jets.
//
// The gradient is compared against central differences of the value; the
// Hessian against central differences of the analytic gradient. Second
// differences of the value lose ~eps/h^2 to cancellation, which swamps the
// tiny curvature of the fractional-power pieces at h = 1e-5 (1 + |z|).

#include <algorithm>
#include <cmath>

#include "driftcert/fields/scalar_field.hpp"

namespace driftcert {

struct JetCheck {
    double gradient_rel_error = 0.0;
    double hessian_rel_error = 0.0;

    double worst() const { return std::max(gradient_rel_error, hessian_rel_error); }
};

inline double fd_step(const State& z) { return 1e-5 * (1.0 + z.norm()); }

inline JetCheck check_jet(const ScalarField& f, const State& z, double h) {
    const Jet2 j = f.jet(z);
    const Jet2 xp = f.jet({z.x + h, z.y});
    const Jet2 xm = f.jet({z.x - h, z.y});
    const Jet2 yp = f.jet({z.x, z.y + h});
    const Jet2 ym = f.jet({z.x, z.y - h});

    const double gx = (xp.v - xm.v) / (2 * h);
    const double gy = (yp.v - ym.v) / (2 * h);
    const double hxx = (xp.dx - xm.dx) / (2 * h);
    const double hyy = (yp.dy - ym.dy) / (2 * h);
    const double hxy = 0.5 * ((xp.dy - xm.dy) + (yp.dx - ym.dx)) / (2 * h);

    const double gscale = std::max({std::abs(j.dx), std::abs(j.dy), 1e-300});
    const double hscale = std::max({std::abs(j.dxx), std::abs(j.dxy), std::abs(j.dyy), 1e-300});
    JetCheck out;
    out.gradient_rel_error = std::max(std::abs(gx - j.dx), std::abs(gy - j.dy)) / gscale;
    out.hessian_rel_error =
        std::max({std::abs(hxx - j.dxx), std::abs(hxy - j.dxy), std::abs(hyy - j.dyy)}) / hscale;
    return out;
}

inline JetCheck check_jet(const ScalarField& f, const State& z) { return check_jet(f, z, fd_step(z)); }

}  // namespace driftcert
