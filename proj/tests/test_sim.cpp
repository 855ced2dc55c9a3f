#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "driftcert/explosion/starts.hpp"
#include "driftcert/sim/ensemble.hpp"
#include "driftcert/sim/histogram.hpp"
#include "driftcert/sim/ode.hpp"
#include "driftcert/sim/phase.hpp"

using namespace driftcert;
using Catch::Approx;

namespace {

const ModelParams kErgodic(-1, -1, 1, 2, 1, 1);
const ModelParams kExplosive(-1, -1, 2, 1, 0.1, 0.1);

struct ThreadsEnv {
    explicit ThreadsEnv(const char* n) { setenv("DRIFTCERT_THREADS", n, 1); }
    ~ThreadsEnv() { unsetenv("DRIFTCERT_THREADS"); }
};

bool same_path(const Trajectory& a, const Trajectory& b) {
    if (a.status != b.status || a.status_time != b.status_time || a.times != b.times) return false;
    for (std::size_t k = 0; k < a.states.size(); ++k)
        if (a.states[k].x != b.states[k].x || a.states[k].y != b.states[k].y) return false;
    return true;
}

Histogram2D point_mass(const Box& box, std::size_t bins, const State& z) {
    HistogramCounter c(box, bins, bins);
    c.add(z);
    return c.finish();
}

}  // namespace

// Zero draws stand in for kappa = 0: the noise enters only through
// sqrt(2 kappa dt) xi, and the model requires kappa2 > 0.
TEST_CASE("sde_step keeps the origin fixed without drift or noise", "[sde]") {
    const ModelParams p(0, 0, 1, 2, 0, 1);
    const State z = sde_step(p, {0, 0}, 1e-2, 0.0, 0.0);
    CHECK(z.x == 0.0);
    CHECK(z.y == 0.0);
}

TEST_CASE("sde_step is consistent with the drift as dt shrinks", "[sde]") {
    const ModelParams p(-1, -0.5, 1, 2, 0.5, 0.3);
    const State z{0.7, -0.4};
    const double xi1 = 0.3, xi2 = -1.1;
    const Vec2 b = drift(p, z);
    double dt = 1e-2;
    double prev = 0.0;
    for (int k = 0; k <= 6; ++k, dt *= 0.5) {
        const State n = sde_step(p, z, dt, xi1, xi2);
        const double nx = std::sqrt(2.0 * p.kappa1 * dt) * xi1;
        const double ny = std::sqrt(2.0 * p.kappa2 * dt) * xi2;
        // the noise part scales like sqrt(dt) exactly
        const double dx = (n.x - z.x - nx) / dt;
        const double dy = (n.y - z.y - ny) / dt;
        const double err = std::hypot(dx - b.x, dy - b.y);
        CHECK(err <= 1.01 * dt * b.norm() * b.norm());
        if (k > 0) CHECK(err / prev == Approx(0.5).margin(0.02));
        prev = err;
    }
}

TEST_CASE("tamed increment is bounded for any state", "[sde]") {
    Stream s(7, 0);
    for (int k = 0; k < 10000; ++k) {
        const double r = s.log_uniform(1e-3, 1e8);
        const double th = s.uniform(0.0, 2.0 * std::numbers::pi);
        const State z{r * std::cos(th), r * std::sin(th)};
        const ModelParams p(s.uniform(-2, 2), s.uniform(-2, 2), s.uniform(0.1, 3), s.uniform(0.1, 3),
                            s.uniform(0, 2), s.uniform(0, 2));
        const double dt = s.log_uniform(1e-5, 1.0);
        const double xi1 = s.normal(), xi2 = s.normal();
        const State n = sde_step(p, z, dt, xi1, xi2);
        const double bound = 1.0 + std::abs(std::sqrt(2.0 * p.kappa1 * dt) * xi1) +
                             std::abs(std::sqrt(2.0 * p.kappa2 * dt) * xi2);
        CHECK(std::hypot(n.x - z.x, n.y - z.y) <= bound * (1.0 + 1e-12));
    }
}

TEST_CASE("integrate validates its options", "[sde]") {
    PathOptions o;
    o.threshold = 999.0;
    CHECK_THROWS_AS(integrate(kErgodic, {0, 0}, o, 1), std::invalid_argument);
    o = {};
    o.dt = 0.0;
    CHECK_THROWS_AS(integrate(kErgodic, {0, 0}, o, 1), std::invalid_argument);
}

TEST_CASE("trajectory layout follows the save stride", "[sde]") {
    PathOptions o{1e-2, 1.0, 1e6, 10};
    const Trajectory tr = integrate(kErgodic, {1, 1}, o, 3);
    REQUIRE(tr.status == PathStatus::Alive);
    REQUIRE(tr.times.size() == 11);
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == Approx(1.0));
    CHECK(tr.status_time == tr.times.back());
    for (std::size_t k = 1; k < tr.times.size(); ++k) CHECK(tr.times[k] > tr.times[k - 1]);
    for (const auto& z : tr.states) CHECK(z.finite());
    o.save_stride = 0;
    CHECK(integrate(kErgodic, {1, 1}, o, 3).times.size() == 2);
}

TEST_CASE("exploded paths end beyond the threshold", "[sde]") {
    PathOptions o{1e-3, 50.0, 1e3, 0};
    const Trajectory tr = integrate(kExplosive, {-10, 0}, o, 5);
    REQUIRE(tr.exploded());
    CHECK(tr.last().norm() >= o.threshold);
    CHECK(tr.status_time == tr.times.back());
    CHECK(tr.status_time < o.horizon);
}

TEST_CASE("paths are bit-identical across runs and thread counts", "[sde][determinism]") {
    PathOptions o{1e-3, 2.0, 1e6, 50};
    std::vector<Trajectory> a, b;
    {
        ThreadsEnv env("1");
        a = ensemble_paths(kErgodic, {-3, 2}, 16, o, 99);
    }
    {
        ThreadsEnv env("3");
        b = ensemble_paths(kErgodic, {-3, 2}, 16, o, 99);
    }
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(same_path(a[k], b[k]));
    // ensembles keep endpoints only
    CHECK(same_path(a[4], integrate(kErgodic, {-3, 2}, {1e-3, 2.0, 1e6, 0}, derive_seed(99, 4))));
}

TEST_CASE("mirror symmetry y -> -y with equal kappas", "[sde]") {
    const ModelParams p(-0.5, -1, 1.5, 2, 0.7, 0.7);
    const PathNoise noise(1234);
    PathOptions o{1e-3, 3.0, 1e6, 1};
    const Trajectory up = integrate_with(p, {0.8, 1.3}, o, noise);
    const Trajectory down = integrate_with(p, {0.8, -1.3}, o, [&](std::uint64_t k) {
        const auto [a, b] = noise(k);
        return std::pair{a, -b};
    });
    REQUIRE(up.states.size() == down.states.size());
    for (std::size_t k = 0; k < up.states.size(); ++k) {
        CHECK(up.states[k].x == down.states[k].x);
        CHECK(up.states[k].y == -down.states[k].y);
    }
}

TEST_CASE("ergodic start far out on the negative axis stays alive", "[sde][ergodic]") {
    const PathOptions o{1e-4, 50.0, 1e6, 0};
    for (std::uint64_t s = 0; s < 3; ++s) CHECK(integrate(kErgodic, {-30, 0}, o, s).status == PathStatus::Alive);
}

TEST_CASE("noiseless tamed verdict matches the RK4 flow", "[sde][ode]") {
    const ModelParams& p = kExplosive;
    const PathOptions o{1e-4, 200.0, 1e6, 0};
    const auto silent = [](std::uint64_t) { return std::pair{0.0, 0.0}; };
    FlowOptions f;
    f.horizon = 200.0;
    int exploded = 0;
    for (int k = 0; k < 20; ++k) {
        const double th = 2.0 * std::numbers::pi * (k + 0.5) / 20.0;
        const State z0{3.0 * std::cos(th), 3.0 * std::sin(th)};
        const bool tamed = integrate_with(p, z0, o, silent).exploded();
        const bool rk4 = deterministic_flow(p, z0, f).exploded();
        CHECK(tamed == rk4);
        exploded += rk4;
    }
    // both verdicts occur among the starts
    CHECK(exploded > 0);
    CHECK(exploded < 20);
}

TEST_CASE("raising the threshold never turns an alive path into an exploded one", "[sde]") {
    const ModelParams p = kExplosive.with_kappa(1.0, 1.0);
    for (std::uint64_t s = 0; s < 40; ++s) {
        const State z0{-1.0 - 0.1 * static_cast<double>(s), 0.5};
        const Trajectory lo = integrate(p, z0, {1e-3, 20.0, 1e3, 0}, s);
        const Trajectory hi = integrate(p, z0, {1e-3, 20.0, 1e4, 0}, s);
        if (hi.exploded()) {
            REQUIRE(lo.exploded());
            CHECK(lo.status_time <= hi.status_time);
        }
        if (!lo.exploded()) CHECK_FALSE(hi.exploded());
    }
}

TEST_CASE("deterministic flow keeps a fixed point and accepts its options", "[ode]") {
    const ModelParams p(0, 0, 1, 2, 0, 1);
    FlowOptions f;
    f.horizon = 5.0;
    const Trajectory tr = deterministic_flow(p, {0, 0}, f);
    CHECK(tr.status == PathStatus::Alive);
    CHECK(tr.last().x == 0.0);
    CHECK(tr.last().y == 0.0);
    CHECK(tr.status_time == Approx(5.0));
    f.tol = 0.0;
    CHECK_THROWS_AS(deterministic_flow(p, {0, 0}, f), std::invalid_argument);
}

TEST_CASE("RK4 flow reproduces the closed-form blow-up on the x-axis", "[ode]") {
    // x' = -x - alpha1 x^2 from x0 < -1/alpha1 diverges at
    // T = log(alpha1 x0 / (alpha1 x0 + 1)) for threshold -> infinity.
    const ModelParams p(-1, -1, 2, 1, 0, 1);
    const double x0 = -4.0;
    const double T = std::log(2.0 * x0 / (2.0 * x0 + 1.0));
    FlowOptions f;
    f.threshold = 1e8;
    const Trajectory tr = deterministic_flow(p, {x0, 0}, f);
    REQUIRE(tr.exploded());
    // escape from 1e8 to infinity takes about 1 / (alpha1 1e8)
    CHECK(tr.status_time == Approx(T).epsilon(1e-6));
}

TEST_CASE("Wilson interval", "[ensemble]") {
    const auto [lo, hi] = wilson_interval(5, 10);
    CHECK(lo == Approx(0.2365931).epsilon(1e-6));
    CHECK(hi == Approx(0.7634069).epsilon(1e-6));
    for (std::size_t n : {1u, 2u, 7u, 100u, 1000u})
        for (std::size_t k = 0; k <= n; k += std::max<std::size_t>(1, n / 7)) {
            const auto [a, b] = wilson_interval(k, n);
            const double p = static_cast<double>(k) / static_cast<double>(n);
            CHECK(0.0 <= a);
            CHECK(a <= p);
            CHECK(p <= b);
            CHECK(b <= 1.0);
            const auto [c, d] = wilson_interval(n - k, n);
            CHECK(a == Approx(1.0 - d).margin(1e-15));
            CHECK(b == Approx(1.0 - c).margin(1e-15));
        }
    CHECK(wilson_interval(0, 1).first == 0.0);
    CHECK(wilson_interval(1, 1).second == 1.0);
    CHECK(wilson_interval(0, 1000).second > 0.0);
    CHECK_THROWS_AS(wilson_interval(0, 0), std::invalid_argument);
}

TEST_CASE("single-path ensemble", "[ensemble]") {
    const EnsembleStats s = ensemble(kErgodic, {0, 0}, 1, {1e-3, 1.0, 1e6, 0}, 3);
    CHECK(s.n == 1);
    CHECK((s.explosion_fraction == 0.0 || s.explosion_fraction == 1.0));
    CHECK(s.wilson_ci95.first <= s.explosion_fraction);
    CHECK(s.explosion_fraction <= s.wilson_ci95.second);
    CHECK_THROWS_AS(ensemble(kErgodic, {0, 0}, 0, {}, 3), std::invalid_argument);
}

TEST_CASE("no explosions in the ergodic regime with strong noise", "[ensemble][ergodic]") {
    const EnsembleStats s = ensemble(kErgodic.with_kappa(2, 2), {-30, 0}, 1000, {1e-3, 10.0, 1e6, 0}, 17);
    CHECK(s.n == 1000);
    CHECK(s.n_exploded == 0);
    CHECK(s.n_failed == 0);
    CHECK(s.explosion_fraction == 0.0);
    CHECK_FALSE(s.mean_t_exp.has_value());
}

TEST_CASE("wedge starts explode in the explosive regime", "[ensemble][explosive]") {
    const State z0 = wedge_start(choose_wedge(kExplosive));
    const EnsembleStats s = ensemble(kExplosive, z0, 200, explosion_ensemble_options(), 23);
    CHECK(s.explosion_fraction >= 0.5);
    CHECK(s.wilson_ci95.first > 0.0);
    REQUIRE(s.mean_t_exp.has_value());
    CHECK(*s.mean_t_exp < explosion_ensemble_options().horizon);
}

TEST_CASE("histogram mass identity and layout", "[histogram]") {
    HistogramSpec spec;
    spec.bins_x = 8;
    spec.bins_y = 5;
    const Histogram2D h = invariant_histogram(kErgodic, {1, 1}, 1.0, 50.0, 1e-3, spec, 5);
    CHECK(h.x_edges.size() == 9);
    CHECK(h.y_edges.size() == 6);
    CHECK(h.mass.size() == 40);
    CHECK(std::abs(h.total() - 1.0) <= 1e-12);
    for (double m : h.mass) CHECK(m >= 0.0);
    CHECK(h.outside >= 0.0);

    HistogramCounter c({0, 2, 0, 1}, 2, 1);
    c.add({0.5, 0.5});
    c.add({1.5, 0.5});
    c.add({1.5, 0.2});
    c.add({3.0, 0.5});
    const Histogram2D g = c.finish();
    CHECK(g.at(0, 0) == 0.25);
    CHECK(g.at(1, 0) == 0.5);
    CHECK(g.outside == 0.25);
    CHECK_THROWS_AS(invariant_histogram(kErgodic, {1, 1}, 5.0, 5.0, 1e-3, spec, 5), std::invalid_argument);
}

TEST_CASE("explosions during a histogram run are reported, not binned", "[histogram]") {
    CHECK_THROWS_AS(invariant_histogram(kExplosive, {-10, 0}, 0.0, 50.0, 1e-3, {}, 1, 1e3), PathExploded);
}

TEST_CASE("total variation distance", "[histogram]") {
    const Box box;
    const Histogram2D a = point_mass(box, 10, {-2, -2});
    const Histogram2D b = point_mass(box, 10, {2, 2});
    CHECK(tv_distance(a, a) == 0.0);
    CHECK(tv_distance(a, b) == 1.0);
    const Histogram2D h = invariant_histogram(kErgodic, {0, 0}, 1.0, 20.0, 1e-3, {box, 10, 10}, 8);
    const Histogram2D k = invariant_histogram(kErgodic, {0, 0}, 1.0, 20.0, 1e-3, {box, 10, 10}, 9);
    CHECK(tv_distance(h, h) == 0.0);
    CHECK(tv_distance(h, k) == tv_distance(k, h));
    CHECK(tv_distance(h, k) >= 0.0);
    CHECK(tv_distance(h, k) <= 1.0);
    CHECK_THROWS_AS(tv_distance(a, point_mass(box, 11, {0, 0})), std::invalid_argument);
    CHECK_THROWS_AS(tv_distance(a, point_mass({-5, 5, -4, 4}, 10, {0, 0})), std::invalid_argument);
}

TEST_CASE("occupation histograms from distant starts agree", "[histogram][ergodic]") {
    const HistogramSpec spec;
    const Histogram2D a = invariant_histogram(kErgodic, {5, 5}, 100.0, 2100.0, 1e-3, spec, 31);
    const Histogram2D b = invariant_histogram(kErgodic, {-5, 0}, 100.0, 2100.0, 1e-3, spec, 32);
    CHECK(tv_distance(a, b) <= 0.1);
}

TEST_CASE("law at time t approaches the occupation histogram", "[histogram][ergodic]") {
    HistogramSpec spec;
    spec.bins_x = spec.bins_y = 20;
    const Histogram2D ref = invariant_histogram(kErgodic, {5, 5}, 100.0, 2100.0, 1e-3, spec, 31);
    const TvDecay d = tv_decay(kErgodic, {-5, 0}, {1, 2, 4, 8}, 2000, 1e-3, spec, ref, 41);
    REQUIRE(d.distances.size() == 4);
    CHECK(d.slope < 0.0);
    CHECK(d.distances.front() > d.distances.back());
}

TEST_CASE("log-linear slope recovers an exponential rate", "[histogram]") {
    const std::vector<double> t{1, 2, 4, 8};
    std::vector<double> d;
    for (double s : t) d.push_back(0.7 * std::exp(-0.3 * s));
    CHECK(log_linear_slope(t, d) == Approx(-0.3).epsilon(1e-12));
    CHECK_THROWS_AS(log_linear_slope({1}, {1}), std::invalid_argument);
}

TEST_CASE("complex preset mode sits at the stable equilibrium", "[histogram]") {
    // z = 0 is stable for z' = -z - z^2 and z = -1 is a saddle.
    const ModelParams p = complex_preset(0.1, 0.1);
    const Histogram2D h = invariant_histogram(p, {0, 0}, 10.0, 2010.0, 1e-3, {}, 51);
    std::size_t best = 0;
    for (std::size_t k = 1; k < h.mass.size(); ++k)
        if (h.mass[k] > h.mass[best]) best = k;
    const std::size_t i = best % h.nx(), j = best / h.nx();
    const double w = h.x_edges[1] - h.x_edges[0];
    const double cx = 0.5 * (h.x_edges[i] + h.x_edges[i + 1]);
    const double cy = 0.5 * (h.y_edges[j] + h.y_edges[j + 1]);
    CHECK(std::abs(cx) <= w);
    CHECK(std::abs(cy) <= w);
}

TEST_CASE("phase diagram layout and reproducibility", "[phase]") {
    const PhaseGrid grid = PhaseGrid::uniform(0.5, 2.5, 3);
    CHECK(grid.alpha1 == std::vector<double>{0.5, 1.5, 2.5});
    const ModelParams base(-1, -1, 1, 1, 0, 0.1);
    const PathOptions o = explosion_ensemble_options();
    std::vector<PhaseCell> a, b;
    {
        ThreadsEnv env("1");
        a = phase_diagram(grid, base, wedge_adapted_start, 20, o, 77);
    }
    {
        ThreadsEnv env("4");
        b = phase_diagram(grid, base, wedge_adapted_start, 20, o, 77);
    }
    REQUIRE(a.size() == 9);
    for (std::size_t c = 0; c < a.size(); ++c) {
        CHECK(a[c].alpha1 == grid.alpha1[c / 3]);
        CHECK(a[c].alpha2 == grid.alpha2[c % 3]);
        CHECK(a[c].stats.n_exploded == b[c].stats.n_exploded);
        CHECK(a[c].stats.mean_t_exp == b[c].stats.mean_t_exp);
        const ModelParams p = base.with_alpha(a[c].alpha1, a[c].alpha2);
        CHECK(a[c].stats.n_exploded ==
              ensemble(p, a[c].z0, 20, o, derive_seed(77, c)).n_exploded);
        if (a[c].alpha2 - a[c].alpha1 >= 0.5) CHECK(a[c].stats.n_exploded == 0);
        if (a[c].alpha1 - a[c].alpha2 >= 0.5) CHECK(a[c].stats.n_exploded > 0);
    }
}
