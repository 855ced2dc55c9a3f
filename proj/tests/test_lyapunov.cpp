#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "driftcert/fields/jet_check.hpp"
#include "driftcert/lyapunov/cover.hpp"
#include "driftcert/lyapunov/scaling.hpp"

using namespace driftcert;
using Catch::Approx;

namespace {

const ModelParams kRef(-1, -1, 1, 2, 0, 1);

const CoverParams& ref_cover() {
    static const CoverParams c = cover_params(kRef);
    return c;
}

ModelParams ref_model(double kappa1) { return kRef.with_kappa(kappa1, ref_cover().kappa2_star); }

// The default step 1e-5 (1 + |z|) is too wide for the blend layers: the
// patches change over widths 1/2 in x and ~|x|^(-1/2) in y near the
// negative x-axis, the bump steepens like 1/t^2 at the layer edges, and the
// central difference error grows like h^2.
double local_step(const State& z) {
    if (z.x < -2.0 && std::abs(z.y) * std::sqrt(-z.x) < 3.0) return 1e-6 / std::sqrt(-z.x);
    return std::min(fd_step(z), 1e-6);
}

Band ref_band() {
    const double R = glue_radii(ref_cover()).R;
    return {R, 100.0 * R};
}

}  // namespace

TEST_CASE("appendix values for the reference parameters", "[appendix]") {
    const CoverParams& c = ref_cover();
    CHECK(c.sigma == 0.75);
    CHECK(c.eta == 1.0);
    CHECK(c.Dcap == 3.0);
    CHECK(c.Ncap == 3.0);
    CHECK(c.C1 == 2.0);
    CHECK(c.C2 == 1.0);
    CHECK(c.delta == c.kappa2_star / 8.0);
    CHECK(c.beta == (2.0 + c.sigma) * c.delta);
    CHECK(c.gamma == (1.0 - c.sigma) * c.delta);
    CHECK(c.C3 == 1.0 / (2.0 * std::pow(3.0, c.delta)));
    CHECK(appendix_violations(kRef, c).empty());
}

TEST_CASE("kappa2_star satisfies the closed-form inequalities by substitution", "[appendix]") {
    const double k = ref_cover().kappa2_star;
    REQUIRE(k > 0.0);
    REQUIRE(k <= 1.0);
    const double delta = k / 8.0;
    CHECK((1.0 - 1.5) + k * 0.75 * (1.5 * k / 8.0 + 1.0) < 0.0);
    CHECK(delta > 0.0);
    CHECK(delta < 0.5);
    CHECK(0.25 * delta > 0.0);
    CHECK(0.25 * delta < 0.5);
    CHECK(verify_patch(1, kRef, ref_cover()).passes());
}

TEST_CASE("a2 = 0 removes the correction terms", "[appendix]") {
    const ModelParams p(0, 0, 1, 2, 0, 1);
    const CoverParams c = appendix_params(p, 0.25);
    CHECK(c.Dcap == 2.0);
    CHECK(c.Ncap == 1.0);
    CHECK(appendix_violations(p, c).empty());
}

TEST_CASE("cover parameters reject the explosive regime", "[appendix]") {
    CHECK_THROWS_AS(cover_params(ModelParams(-1, -1, 2, 1, 0, 1)), std::invalid_argument);
    CHECK_THROWS_AS(cover_params(ModelParams(-1, -1, 1, 1, 0, 1)), std::invalid_argument);
    CHECK_THROWS_AS(appendix_params(kRef, 0.0), std::invalid_argument);
}

TEST_CASE("appendix violations are reported", "[appendix]") {
    CoverParams c = ref_cover();
    c.C5 = c.Ncap * c.C4 * 2.0;
    const auto bad = appendix_violations(kRef, c);
    REQUIRE(bad.size() == 1);
    CHECK(bad.front() == "N C4 > C5");
    // kappa2 = 1 breaks the phi2 rate: -0.5 + 0.75 (1.5/8 + 1) > 0.
    CHECK_FALSE(closed_form_conditions(kRef, appendix_params(kRef, 1.0)));
}

TEST_CASE("piece values at anchor points", "[pieces]") {
    const CoverParams& c = ref_cover();
    const ModelParams p = ref_model(0);
    const auto p1 = make_piece(1, p, c);
    CHECK(p1.phi.value({-4, 0}) == Approx(10.0 * std::pow(4.0, c.beta)).epsilon(1e-15));
    CHECK(p1.region.contains({-4, 0}));

    for (double y : {1.5, -7.0, 40.0})
        CHECK(piece_jet(4, c, {0, y}).v == Approx(c.C4 * c.Ncap * std::pow(std::abs(y), 2 * c.gamma)).epsilon(1e-15));

    const State z5{c.Ncap, 0};
    const double v5 = piece_jet(5, c, z5).v;
    CHECK(v5 == Approx(c.C5 * std::pow(c.eta * c.Ncap * c.Ncap, c.gamma)).epsilon(1e-15));
    CHECK(v5 > 0.0);
    CHECK(region_U(5, c).contains(z5));

    CHECK_THROWS_AS(make_piece(0, p, c), std::invalid_argument);
    CHECK_THROWS_AS(make_piece(6, p, c), std::invalid_argument);
    CHECK_THROWS_AS(make_piece(1, ModelParams(-1, -1, 2, 3, 0, 0.5), c), std::invalid_argument);
}

TEST_CASE("strong subcover sits inside the cover and away from its boundary", "[pieces]") {
    const CoverParams& c = ref_cover();
    const Band band{1.0, 1000.0};
    for (int i = 1; i <= 5; ++i) {
        const Region v = strong_subcover(i, c);
        const Region u = region_U(i, c);
        for (const State& z : sample_region(v, 77 + i, 2000, band)) {
            INFO("V" << i << " at (" << z.x << ", " << z.y << ")");
            REQUIRE(u.contains(z));
            // Still inside U after a nudge of 0.05 in any axis direction:
            // closure(V) does not touch the boundary of U.
            for (auto [dx, dy] : {std::pair{0.05, 0.0}, {-0.05, 0.0}, {0.0, 0.05}, {0.0, -0.05}})
                if (i != 1 && i != 2) CHECK(u.contains({z.x + dx, z.y + dy}));
        }
    }
    // V1 against the cusp boundaries, using the exact margins 3 > 2 and 1.5 < 2.
    for (double s : {3.0, 10.0, 1e4}) {
        const double y = 1.5 / std::sqrt(s);
        CHECK(std::abs(y) * std::sqrt(s) < 2.0);
        CHECK(-s < -2.0);
    }
}

TEST_CASE("subcover covers the plane outside the reported radius", "[pieces]") {
    const CoverParams& c = ref_cover();
    const double R = glue_radii(c).R;
    const Region plane = whole_plane();
    std::size_t uncovered = 0;
    for (const State& z : sample_region(plane, 4242, 100000, {R, 1e4 * R})) {
        bool hit = false;
        for (int i = 1; i <= 5 && !hit; ++i) hit = strong_subcover(i, c).contains(z);
        if (!hit) ++uncovered;
    }
    CHECK(uncovered == 0);
    CHECK(glue_radii(c).subcover <= R);
}

TEST_CASE("sampled points satisfy their region's predicate", "[pieces]") {
    const CoverParams& c = ref_cover();
    const Band band = ref_band();
    for (int i = 1; i <= 4; ++i) {
        const Region o = overlap_region(i, c);
        for (const State& z : sample_region(o, 90 + i, 500, band)) {
            CHECK(o.contains(z));
            CHECK(in_U(i, c, z));
            CHECK(in_U(i + 1, c, z));
        }
    }
}

TEST_CASE("analytic jets of pieces, patches and Phi match finite differences", "[jets]") {
    const CoverParams& c = ref_cover();
    const ModelParams p = ref_model(1);
    const Band band{3.0, 300.0};
    for (int i = 1; i <= 5; ++i) {
        const auto piece = make_piece(i, p, c);
        for (const State& z : sample_region(strong_subcover(i, c), 300 + i, 100, band)) {
            INFO("phi" << i << " at (" << z.x << ", " << z.y << ")");
            CHECK(check_jet(piece.phi, z, local_step(z)).worst() <= 1e-4);
        }
    }
    for (int i = 1; i <= 4; ++i) {
        const ScalarField f = patch(i, p, c);
        for (const State& z : sample_region(overlap_region(i, c), 400 + i, 100, band)) {
            INFO("phi" << i << i + 1 << " at (" << z.x << ", " << z.y << ")");
            CHECK(check_jet(f, z, local_step(z)).worst() <= 1e-4);
        }
    }
    const GlobalPhi phi = global_phi(p, c);
    const double R = phi.R();
    for (const State& z : sample_region(stratified_plane(c), 500, 100, {0.5 * R, 30.0 * R})) {
        INFO("Phi at (" << z.x << ", " << z.y << ")");
        CHECK(check_jet(phi.field, z, local_step(z)).worst() <= 1e-4);
    }
}

TEST_CASE("Phi is smooth across the patch seams", "[jets]") {
    const CoverParams& c = ref_cover();
    const ModelParams p = ref_model(0);
    const GlobalPhi phi = global_phi(p, c);
    const double N = c.Ncap;
    // Points on the boundary of each overlap, beyond R.
    const std::vector<State> seams{
        {-400.0, 1.0 / 20.0},  {-400.0, -2.0 / 20.0},  // q = 0 and q = 1 edges of U1 & U2
        {-50.0, 1.0},          {-50.0, -2.0},          // |y| = 1, 2 edges of U2 & U3
        {-1.0, 60.0},          {-0.5, -60.0},          // x = -1, -1/2 edges of U3 & U4
        {0.5 * N, 80.0},       {N, -80.0},             // x = N/2, N edges of U4 & U5
    };
    for (const State& z : seams) {
        INFO("seam point (" << z.x << ", " << z.y << ")");
        CHECK(check_jet(phi.field, z, local_step(z)).gradient_rel_error <= 1e-4);
    }
}

TEST_CASE("patches reduce to the pieces where the blend is 0 or 1", "[patch]") {
    const CoverParams& c = ref_cover();
    const ModelParams p = ref_model(0);
    // phi12 at q = 0 (|x|^(1/2)|y| = 1) and q = 1.
    const State a{-100.0, 0.1}, b{-100.0, 0.2};
    CHECK(patch(1, p, c).value(a) == piece_jet(1, c, a).v);
    CHECK(patch(1, p, c).value(b) == piece_jet(2, c, b).v);
    const State u2{-100.0, 0.05};  // in U1 only; rho = 0
    CHECK(patch(1, p, c).value(u2) == piece_jet(1, c, u2).v);
    const State d{-50.0, 1.0}, e{-50.0, 2.0};
    CHECK(patch(2, p, c).value(d) == piece_jet(2, c, d).v);
    CHECK(patch(2, p, c).value(e) == piece_jet(3, c, e).v);
    const State f{-1.0, 30.0}, g{-0.5, 30.0};
    CHECK(patch(3, p, c).value(f) == piece_jet(3, c, f).v);
    CHECK(patch(3, p, c).value(g) == piece_jet(4, c, g).v);
    const State h{0.5 * c.Ncap, 40.0}, k{c.Ncap, 40.0};
    CHECK(patch(4, p, c).value(h) == piece_jet(4, c, h).v);
    CHECK(patch(4, p, c).value(k) == piece_jet(5, c, k).v);
    CHECK_THROWS_AS(patch(5, p, c), std::invalid_argument);
}

TEST_CASE("smooth step anchors", "[patch]") {
    CHECK(smooth_step(0.5) == Approx(0.5).epsilon(1e-15));
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(1.0) == 1.0);
    CHECK(smooth_step(-3.0) == 0.0);
    CHECK(smooth_step(7.0) == 1.0);
    // Reference from 50-digit quadrature.
    CHECK(smooth_step(0.3) == Approx(0.187127765688767710).epsilon(1e-13));
    CHECK(bump_mass() == Approx(0.22199690808403971).epsilon(1e-13));
    for (double t = 0.01; t < 1.0; t += 0.01) {
        CHECK(smooth_step(1.0 - t) == Approx(1.0 - smooth_step(t)).margin(1e-15));
        CHECK(smooth_step(t) < smooth_step(t + 0.01));
    }
    // Patch 1 at mid-overlap, |x|^(1/2)|y| = 1.5.
    CHECK(blend_jet(1, ref_cover(), {-16.0, 1.5 / 4.0}).v == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("patched function lies between the two pieces", "[patch]") {
    const CoverParams& c = ref_cover();
    const ModelParams p = ref_model(0);
    for (int i = 1; i <= 4; ++i) {
        const ScalarField f = patch(i, p, c);
        for (const State& z : sample_region(overlap_region(i, c), 600 + i, 1000, ref_band())) {
            const double lo = piece_jet(i, c, z).v;
            const double hi = piece_jet(i + 1, c, z).v;
            const double v = f.value(z);
            const double tol = 1e-14 * std::max(std::abs(lo), std::abs(hi));
            CHECK(v >= std::min(lo, hi) - tol);
            CHECK(v <= std::max(lo, hi) + tol);
        }
    }
}

TEST_CASE("generator of a patch equals its term-by-term expansion", "[patch]") {
    const CoverParams& c = ref_cover();
    for (double k1 : {0.0, 1.0}) {
        const ModelParams p = ref_model(k1);
        for (int i = 1; i <= 4; ++i) {
            double worst = 0.0;
            for (const State& z : sample_region(overlap_region(i, c), 700 + i, 1000, ref_band()))
                worst = std::max(worst, lpatch_relative_error(i, p, c, z));
            INFO("patch " << i << " kappa1 = " << k1);
            CHECK(worst <= 1e-9);
        }
    }
}

TEST_CASE("pieces grow without bound on their subcover", "[pieces]") {
    const CoverParams& c = ref_cover();
    const double R = glue_radii(c).R;
    for (int i = 1; i <= 5; ++i) {
        const Region v = strong_subcover(i, c);
        double previous = -std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 4; ++k) {
            // Minimum over the circle |z| = r restricted to V_i; the minimum
            // over |z| >= r is attained there for every piece.
            const double r = R * std::ldexp(1.0, k);
            double m = std::numeric_limits<double>::infinity();
            // Angular resolution scales with r so the x-spacing stays ~6e-5,
            // well below phi4's growth per doubling.
            const long n = 1000000L << k;
            for (long j = 0; j < n; ++j) {
                const double t = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
                const State z{r * std::cos(t), r * std::sin(t)};
                if (v.contains(z)) m = std::min(m, piece_jet(i, c, z).v);
            }
            INFO("phi" << i << " r = " << r);
            REQUIRE(std::isfinite(m));
            CHECK(m > previous);
            previous = m;
        }
    }
}

TEST_CASE("global Phi anchors", "[phi]") {
    const CoverParams& c = ref_cover();
    const ModelParams p = ref_model(0);
    const GlobalPhi phi = global_phi(p, c);
    const double R = phi.R();
    CHECK(R == 10.0);
    REQUIRE(R < 10.0 * c.Ncap);
    const State z{10.0 * c.Ncap, 0.0};
    CHECK(phi.field.value(z) == piece_jet(5, c, z).v);
    CHECK(phi.field.value({0, 0}) == 1.0);
    CHECK(phi.field.value({3, 4}) == 26.0);
    CHECK_THROWS_AS(global_phi(ModelParams(-1, -1, 2, 1, 0, 1), c), std::invalid_argument);

    for (int k = 0; k < 32; ++k) {
        const double t = 2.0 * std::numbers::pi * k / 32.0;
        const State u{std::cos(t), std::sin(t)};
        double previous = -std::numeric_limits<double>::infinity();
        for (int j = 0; j <= 200; ++j) {
            const double r = 100.0 * R * std::pow(100.0, j / 200.0);
            const double v = phi.field.value({r * u.x, r * u.y});
            INFO("direction " << k << " r = " << r);
            CHECK(v > previous);
            previous = v;
        }
    }
}

TEST_CASE("drift fitting examples", "[certificate]") {
    const CoverParams& c = ref_cover();
    const ModelParams p = ref_model(0);
    const ScalarField one{[](const State&) { return Jet2{1, 0, 0, 0, 0, 0}; }, whole_plane(), "1"};
    const FitResult f = fit_drift_constants(p, one, whole_plane(), {1, 100}, 500, 1);
    CHECK(f.feasible);
    CHECK(f.C == 1.0);
    CHECK(f.sample_max == 1.0);
    CHECK(f.D >= 1.0);

    const auto p1 = make_piece(1, p, c);
    const CertifyResult r1 = certify_drift(p, p1.phi, strong_subcover(1, c), ref_band(), 4000, 11);
    CHECK(r1.passes());
    CHECK(r1.fit.C >= c.kappa2_star / 80.0);

    const DriftCertificate absurd = verify_drift(p, p1.phi, strong_subcover(1, c), ref_band(), 500, 1e6, r1.fit.D, 12);
    CHECK_FALSE(absurd.passes());
    CHECK(absurd.n_violations > 0);
    CHECK(absurd.violations.size() == std::min<std::size_t>(absurd.n_violations, kMaxStoredViolations));
    CHECK_THROWS_AS(verify_drift(p, p1.phi, strong_subcover(1, c), ref_band(), 10, 0.0, 1.0, 1), std::invalid_argument);

    const auto p5 = make_piece(5, p, c);
    const CertifyResult r5 = certify_drift(p, p5.phi, strong_subcover(5, c), ref_band(), 4000, 13);
    CHECK(r5.passes());
    CHECK(r5.cert.min_margin >= 0.0);

    // A function with L f / f -> +infinity: f = x^2 on the far left, where
    // L x^2 ~ -2 alpha1 x^3 > 0.
    const ScalarField sq{[](const State& z) { return Jet2{z.x * z.x, 2 * z.x, 0, 2, 0, 0}; }, whole_plane(), "x^2"};
    const FitResult bad = fit_drift_constants(p, sq, shapes::axis_cusp(3.0, 1.0, "cusp"), ref_band(), 1000, 2);
    CHECK_FALSE(bad.feasible);
    CHECK_FALSE(bad.reason.empty());
}

TEST_CASE("fitting and verification do not depend on the worker count", "[certificate]") {
    const CoverParams& c = ref_cover();
    const ModelParams p = ref_model(1);
    const ScalarField f = patch(3, p, c);
    setenv("DRIFTCERT_THREADS", "1", 1);
    const CertifyResult a = certify_drift(p, f, overlap_region(3, c), ref_band(), 3000, 5);
    setenv("DRIFTCERT_THREADS", "4", 1);
    const CertifyResult b = certify_drift(p, f, overlap_region(3, c), ref_band(), 3000, 5);
    unsetenv("DRIFTCERT_THREADS");
    CHECK(a.fit.C == b.fit.C);
    CHECK(a.fit.D == b.fit.D);
    CHECK(a.cert.min_margin == b.cert.min_margin);
    CHECK(to_json(a.cert, p).dump() == to_json(b.cert, p).dump());
}

TEST_CASE("piece certificates on the subcover", "[certificate]") {
    const CoverParams& c = ref_cover();
    for (double k1 : {0.0, 1.0}) {
        const ModelParams p = ref_model(k1);
        for (int i = 1; i <= 5; ++i) {
            const auto piece = make_piece(i, p, c);
            const CertifyResult r = certify_drift(p, piece.phi, strong_subcover(i, c), ref_band(), 10000, 100 + i);
            INFO("phi" << i << " kappa1 = " << k1 << " C = " << r.fit.C << " D = " << r.fit.D);
            CHECK(r.passes());
        }
    }
}

TEST_CASE("the fourth patch keeps a positive drift term on any representable band", "[certificate]") {
    // phi5 - phi4 = (C5 - N C4)|y|^(2 gamma) + C4 x + ..., negative only once
    // |y|^(2 gamma) > C4 x / (N C4 - C5), which for small gamma is far beyond
    // double range. Below that height b1 (phi5 - phi4) d_x rho45 ~ y^2 wins.
    const CoverParams& c = ref_cover();
    CHECK(patch45_crossover_log10(c) > 308.0);
    const ModelParams p = ref_model(0);
    const State z{0.8 * c.Ncap, 1e6};
    const PatchTerms t = lpatch_terms(4, p, c, z);
    CHECK(piece_jet(5, c, z).v > piece_jet(4, c, z).v);
    CHECK(t.drift_x > 0.0);
    CHECK(t.sum() > 0.0);
    CHECK_FALSE(certify_drift(p, patch(4, p, c), overlap_region(4, c), ref_band(), 2000, 9).fit.feasible);
}

TEST_CASE("scaling identity", "[scaling]") {
    const ScalarField psi{[](const State& z) { return Jet2{z.x * z.x + z.y * z.y, 2 * z.x, 2 * z.y, 2, 0, 2}; },
                          whole_plane(), "x^2+y^2"};
    const ModelParams target(1, 1, 1, 2, 0.25, 0.5);
    const ScalingMap m = scaling_map(target, 4.0);
    CHECK(m.c == Approx(2.0).epsilon(1e-15));
    CHECK(m.source.a1 == Approx(2.0).epsilon(1e-15));
    CHECK(m.source.kappa1 == Approx(2.0).epsilon(1e-14));
    CHECK(m.source.kappa2 == 4.0);
    const double res = scaling_identity_check(target, psi, 4.0, 1000, 21);
    CHECK(res <= 1e-10);

    CHECK(scaling_map(target, 0.5).c == 1.0);
    CHECK(scaling_identity_check(target, psi, 0.5, 1000, 21) <= 1e-12);

    const ScalarField psi3{[psi](const State& z) { return 3.0 * psi.jet(z); }, whole_plane(), "3(x^2+y^2)"};
    const double lhs = scaling_identity_check(target, psi3, 4.0, 1000, 21);
    CHECK(lhs == Approx(3.0 * res).margin(1e-12));

    // A non-polynomial field: a Lyapunov piece.
    const CoverParams& c = ref_cover();
    const ScalarField phi5{[c](const State& z) { return piece_jet(5, c, z); }, whole_plane(), "phi5"};
    CHECK(scaling_identity_check(target, phi5, 4.0, 1000, 22) <= 1e-10);
}

TEST_CASE("certificate JSON layout", "[certificate]") {
    const CoverParams& c = ref_cover();
    const ModelParams p = ref_model(0);
    const auto piece = make_piece(2, p, c);
    const CertifyResult r = certify_drift(p, piece.phi, strong_subcover(2, c), ref_band(), 200, 3);
    const auto j = to_json(r.cert, p);
    CHECK(j["kind"] == "drift");
    CHECK(j["field"] == "phi2");
    CHECK(j["region_label"] == "V2");
    CHECK(j["n_samples"] == 200);
    CHECK(j["radius_band"][0] == 10.0);
    CHECK(j["radius_band"][1] == 1000.0);
    CHECK(j["seed"] == derive_seed(3, 1));
    CHECK(j["params"]["alpha2"] == 2.0);
    CHECK(j["passes"] == r.cert.passes());
    CHECK(j["violations"].is_array());
}
