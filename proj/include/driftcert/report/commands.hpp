#pragma once

// The CLI subcommands. Each returns 0 on success, 1 when a certificate or
// check fails, and throws ConfigError for unusable input (exit code 2).

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "driftcert/explosion/blowup.hpp"
#include "driftcert/explosion/instability.hpp"
#include "driftcert/explosion/starts.hpp"
#include "driftcert/fields/hormander.hpp"
#include "driftcert/lyapunov/pipeline.hpp"
#include "driftcert/report/config.hpp"
#include "driftcert/report/output.hpp"
#include "driftcert/report/svg.hpp"
#include "driftcert/sim/ensemble.hpp"
#include "driftcert/sim/histogram.hpp"
#include "driftcert/sim/phase.hpp"

namespace driftcert {

inline constexpr std::uint64_t kDefaultSeed = 20240601;

// Output files of one run, name -> content, written verbatim.
using Outputs = std::map<std::string, std::string>;

inline void write_outputs(const std::filesystem::path& dir, const Outputs& files) {
    for (const auto& [name, content] : files) write_file(dir / name, content);
}

inline std::filesystem::path out_dir(const RunConfig& cfg) { return cfg.text("run.out_dir", "driftcert-out"); }
inline std::uint64_t run_seed(const RunConfig& cfg) { return cfg.count("run.seed", kDefaultSeed); }

inline std::size_t positive_count(const RunConfig& cfg, const std::string& key, std::uint64_t fallback) {
    const std::uint64_t n = cfg.count(key, fallback);
    if (n == 0) throw ConfigError("'" + key + "' must be >= 1");
    return static_cast<std::size_t>(n);
}

inline PathOptions path_options(const RunConfig& cfg, const std::string& section, const PathOptions& defaults) {
    PathOptions o{cfg.real(section + ".dt", defaults.dt), cfg.real(section + ".horizon", defaults.horizon),
                  cfg.real(section + ".threshold", defaults.threshold),
                  static_cast<std::size_t>(cfg.count(section + ".save_stride", defaults.save_stride))};
    try {
        o.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(section + ": " + e.what());
    }
    return o;
}

// ---------------------------------------------------------------------------

inline int cmd_verify_lyapunov(const RunConfig& cfg, std::ostream& log) {
    ModelParams p = model_from(cfg, {-1, -1, 1, 2, 0, 1});
    if (!(p.alpha2 > p.alpha1))
        throw ConfigError("alpha1 >= alpha2 is the explosive regime: solutions blow up with positive probability "
                          "and no Lyapunov function exists; use the explosion command");
    const std::size_t n = positive_count(cfg, "lyapunov.samples", 10000);
    if (!cfg.has("model.kappa2")) p = p.with_kappa(p.kappa1, cover_params(p).kappa2_star);
    const LyapunovReport r = lyapunov_pipeline(p, n, run_seed(cfg));
    for (const auto& c : r.pieces)
        log << (c.result.passes() ? "PASS " : "FAIL ") << c.name << "  C = " << fmt9(c.result.fit.C)
            << "  D = " << fmt9(c.result.fit.D) << '\n';
    for (const auto& c : r.patches)
        log << (c.result.passes() ? "pass " : "fail ") << c.name << " (informational)\n";
    log << (r.glued.result.passes() ? "PASS " : "FAIL ") << r.glued.name;
    if (!r.glued.result.fit.feasible) log << "  " << r.glued.result.fit.reason;
    log << '\n';
    log << (r.phi1_rate_ok() ? "PASS " : "FAIL ") << "phi1 rate C = " << fmt9(r.pieces[0].result.fit.C)
        << " >= kappa2_star/80 = " << fmt9(r.phi1_C_floor) << '\n';
    write_file(out_dir(cfg) / "lyapunov.json", json_text(to_json(r)));
    return r.passes() ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct ExplosionRun {
    ModelParams model;
    WedgeSpec wedge;
    InstabilityCertificate instability;
    std::vector<BlowupCheck> blowups;
    State z0;
    PathOptions options;
    std::vector<Trajectory> paths;
    EnsembleStats stats;

    bool blowups_hold() const {
        for (const auto& b : blowups)
            if (!b.holds()) return false;
        return true;
    }
    bool passes() const { return instability.passes() && blowups_hold() && stats.explosion_fraction > 0.0; }
};

inline ExplosionRun explosion_run(const ModelParams& p, std::size_t samples, std::size_t starts, std::size_t paths,
                                  const PathOptions& opt, std::uint64_t seed) {
    ExplosionRun r;
    r.model = p;
    r.wedge = choose_wedge(p);
    r.instability = verify_instability(p, r.wedge, samples, derive_seed(seed, 1));
    const Band band{r.wedge.M, 100.0 * r.wedge.M};
    for (const State& z : sample_region(wedge_region(r.wedge.xi, r.wedge.M), derive_seed(seed, 2), starts, band))
        r.blowups.push_back(blowup_bound_check(p, r.wedge, z));
    r.z0 = wedge_start(r.wedge);
    r.options = opt;
    r.paths = ensemble_paths(p, r.z0, paths, opt, derive_seed(seed, 3));
    r.stats = summarize(r.paths);
    return r;
}

inline std::string blowup_csv(const std::vector<BlowupCheck>& v) {
    std::ostringstream o;
    o << "x0,y0,T_coarse,T_fine,T_num,bound,holds\n";
    for (const auto& b : v)
        o << fmt9(b.z0.x) << ',' << fmt9(b.z0.y) << ',' << fmt9(b.T_coarse) << ',' << fmt9(b.T_fine) << ','
          << fmt9(b.T_num) << ',' << fmt9(b.bound) << ',' << (b.holds() ? 1 : 0) << '\n';
    return o.str();
}

inline nlohmann::ordered_json to_json(const ExplosionRun& r) {
    nlohmann::ordered_json j;
    j["params"] = params_json(r.model);
    j["instability"] = to_json(r.instability, r.model);
    double worst = 0.0;
    std::size_t hold = 0;
    for (const auto& b : r.blowups) {
        hold += b.holds();
        if (b.exploded) worst = std::max(worst, b.T_num / b.bound);
    }
    j["blowup"] = {{"n", r.blowups.size()}, {"n_within_bound", hold}, {"max_T_over_bound", round9(worst)},
                   {"slack", 0.05}};
    j["ensemble"] = {{"z0", {round9(r.z0.x), round9(r.z0.y)}}, {"options", to_json(r.options)},
                     {"stats", to_json(r.stats)}};
    j["passes"] = r.passes();
    return j;
}

// The traced path is ensemble path 0 replayed with a save stride.
inline Outputs explosion_outputs(const ExplosionRun& r, std::size_t save_stride, std::uint64_t seed) {
    PathOptions traced = r.options;
    traced.save_stride = save_stride;
    const Trajectory tr = integrate(r.model, r.z0, traced, derive_seed(derive_seed(seed, 3), 0));
    return {{"explosion.json", json_text(to_json(r))},
            {"blowup.csv", blowup_csv(r.blowups)},
            {"ensemble.csv", ensemble_csv(r.model.alpha1, r.model.alpha2, r.stats)},
            {"trajectory.csv", trajectory_csv(tr)}};
}

inline int cmd_explosion(const RunConfig& cfg, std::ostream& log) {
    const ModelParams p = model_from(cfg, {-1, -1, 2, 1, 0.1, 0.1});
    if (!(p.alpha1 > p.alpha2))
        throw ConfigError("alpha2 >= alpha1 is the ergodic regime: solutions never blow up, so there is no "
                          "explosive wedge; use verify-lyapunov");
    const std::size_t samples = positive_count(cfg, "explosion.samples", 10000);
    const std::size_t starts = positive_count(cfg, "explosion.blowup_starts", 50);
    const std::size_t paths = positive_count(cfg, "explosion.paths", 1000);
    PathOptions opt = path_options(cfg, "explosion", explosion_ensemble_options());
    const std::uint64_t seed = run_seed(cfg);
    const ExplosionRun r = explosion_run(p, samples, starts, paths, opt, seed);
    const auto stride = static_cast<std::size_t>(cfg.count("explosion.save_stride", 100));
    write_outputs(out_dir(cfg), explosion_outputs(r, stride, seed));
    log << "wedge xi = " << fmt9(r.wedge.xi) << "  M = " << fmt9(r.wedge.M) << "  C_blow = " << fmt9(r.wedge.C_blow)
        << '\n';
    log << (r.instability.passes() ? "PASS " : "FAIL ") << "instability  C_g = " << fmt9(r.instability.C_g) << '\n';
    log << (r.blowups_hold() ? "PASS " : "FAIL ") << "blow-up bound at " << r.blowups.size() << " wedge starts\n";
    log << (r.stats.explosion_fraction > 0.0 ? "PASS " : "FAIL ") << "ensemble explosion fraction "
        << fmt9(r.stats.explosion_fraction) << " (" << r.stats.n_exploded << "/" << r.stats.n << ")\n";
    return r.passes() ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct PhaseRun {
    PhaseGrid grid;
    std::vector<PhaseCell> cells;

    // Cells at least `margin` away from the diagonal on either side.
    bool ergodic_cells_silent(double margin) const {
        for (const auto& c : cells)
            if (c.alpha2 - c.alpha1 >= margin - 1e-12 && c.stats.n_exploded != 0) return false;
        return true;
    }
    bool explosive_cells_fire(double margin) const {
        for (const auto& c : cells)
            if (c.alpha1 - c.alpha2 >= margin - 1e-12 && c.stats.n_exploded == 0) return false;
        return true;
    }
};

inline PhaseRun phase_run(const ModelParams& base, double lo, double hi, std::size_t n, std::size_t paths,
                          const PathOptions& opt, std::uint64_t seed) {
    PhaseRun r;
    r.grid = PhaseGrid::uniform(lo, hi, n);
    r.cells = phase_diagram(r.grid, base, wedge_adapted_start, paths, opt, seed);
    return r;
}

inline Outputs phase_outputs(const PhaseRun& r) {
    return {{"phase.csv", phase_csv(r.cells)}, {"phase.svg", phase_svg(r.cells, r.grid)}};
}

inline int cmd_phase(const RunConfig& cfg, std::ostream& log) {
    const ModelParams base = model_from(cfg, {-1, -1, 1, 1, 0, 0.1});
    const double lo = cfg.real("phase.lo", 0.5), hi = cfg.real("phase.hi", 2.5);
    if (!(lo > 0.0 && hi >= lo)) throw ConfigError("phase grid needs 0 < lo <= hi");
    const std::size_t n = positive_count(cfg, "phase.n", 8);
    const std::size_t paths = positive_count(cfg, "phase.paths", 200);
    const double margin = cfg.real("phase.margin", 0.5);
    const PathOptions opt = path_options(cfg, "phase", explosion_ensemble_options());
    const PhaseRun r = phase_run(base, lo, hi, n, paths, opt, run_seed(cfg));
    write_outputs(out_dir(cfg), phase_outputs(r));
    const bool quiet = r.ergodic_cells_silent(margin), loud = r.explosive_cells_fire(margin);
    log << (quiet ? "PASS " : "FAIL ") << "no explosions where alpha2 - alpha1 >= " << fmt9(margin) << '\n';
    log << (loud ? "PASS " : "FAIL ") << "explosions where alpha1 - alpha2 >= " << fmt9(margin) << '\n';
    return quiet && loud ? 0 : 1;
}

// ---------------------------------------------------------------------------

inline const std::vector<State>& bracket_sample_points() {
    static const std::vector<State> pts{{0, 0}, {1, 0}, {0, 1}, {-2, 3}, {5, -1}, {-30, 0.5}};
    return pts;
}

inline nlohmann::ordered_json brackets_json(const ModelParams& p, int depth) {
    const BracketReport br = bracket_report(p);
    nlohmann::ordered_json j;
    j["params"] = params_json(p);
    auto fields = nlohmann::ordered_json::array();
    for (const auto& f : br.fields) fields.push_back({{"name", f.label}, {"field", f.field.str()}});
    j["fields"] = fields;
    auto ranks = nlohmann::ordered_json::array();
    for (const State& z : bracket_sample_points()) {
        auto per = nlohmann::ordered_json::array();
        for (int d = 1; d <= depth; ++d) per.push_back(hormander_rank(p, z, d));
        ranks.push_back({{"z", {round9(z.x), round9(z.y)}}, {"rank_by_depth", per}});
    }
    j["max_depth"] = depth;
    j["ranks"] = ranks;
    j["w2w2z_first_component"] = round9(br.computed_constant);
    j["kappa2_squared"] = round9(br.quoted_constant);
    j["note"] = br.note;
    return j;
}

inline int cmd_brackets(const RunConfig& cfg, std::ostream& log) {
    const ModelParams p = model_from(cfg, {-1, -1, 1, 2, 0, 1});
    const auto depth = static_cast<int>(cfg.count("brackets.depth", 3));
    if (depth < 1 || depth > 6) throw ConfigError("brackets.depth must be in 1..6");
    const nlohmann::ordered_json j = brackets_json(p, depth);
    for (const auto& f : j["fields"]) log << f["name"].get<std::string>() << " = " << f["field"].get<std::string>() << '\n';
    bool spans = true;
    for (const auto& r : j["ranks"]) {
        log << "rank at (" << fmt9(r["z"][0].get<double>()) << ", " << fmt9(r["z"][1].get<double>()) << "):";
        for (const auto& k : r["rank_by_depth"]) log << ' ' << k.get<int>();
        log << '\n';
        spans = spans && r["rank_by_depth"].back().get<int>() == 2;
    }
    log << j["note"].get<std::string>() << '\n';
    write_file(out_dir(cfg) / "brackets.json", json_text(j));
    log << (spans ? "PASS " : "FAIL ") << "rank 2 at depth " << depth << " at every sample point\n";
    return spans ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct HistogramRun {
    Histogram2D a, b;
    State za, zb;
    double tv = 0.0;
    TvDecay decay;
};

struct HistogramSettings {
    State za{5, 5}, zb{-5, 0};
    double burn_in = 100.0;
    double length = 1e4;  // sampled time after burn-in
    double dt = 1e-3;
    HistogramSpec spec;
    std::vector<double> decay_times{1, 2, 4, 8};
    std::size_t decay_paths = 5000;
    std::size_t decay_coarsen = 2;
};

inline HistogramRun histogram_run(const ModelParams& p, const HistogramSettings& s, std::uint64_t seed) {
    HistogramRun r;
    r.za = s.za;
    r.zb = s.zb;
    const double end = s.burn_in + s.length;
    r.a = invariant_histogram(p, s.za, s.burn_in, end, s.dt, s.spec, derive_seed(seed, 1));
    r.b = invariant_histogram(p, s.zb, s.burn_in, end, s.dt, s.spec, derive_seed(seed, 2));
    r.tv = tv_distance(r.a, r.b);
    const Histogram2D ref = coarsen(r.a, s.decay_coarsen);
    HistogramSpec coarse = s.spec;
    coarse.bins_x /= s.decay_coarsen;
    coarse.bins_y /= s.decay_coarsen;
    r.decay = tv_decay(p, s.zb, s.decay_times, s.decay_paths, s.dt, coarse, ref, derive_seed(seed, 3));
    return r;
}

inline Outputs histogram_outputs(const ModelParams& p, const HistogramSettings& s, const HistogramRun& r, double tol) {
    nlohmann::ordered_json j;
    j["params"] = params_json(p);
    j["starts"] = {{round9(s.za.x), round9(s.za.y)}, {round9(s.zb.x), round9(s.zb.y)}};
    j["burn_in"] = round9(s.burn_in);
    j["length"] = round9(s.length);
    j["dt"] = round9(s.dt);
    j["bins"] = s.spec.bins_x;
    j["tv_distance"] = round9(r.tv);
    j["tv_tol"] = round9(tol);
    auto dist = nlohmann::ordered_json::array();
    for (double d : r.decay.distances) dist.push_back(round9(d));
    auto times = nlohmann::ordered_json::array();
    for (double t : r.decay.times) times.push_back(round9(t));
    j["decay"] = {{"start", {round9(s.zb.x), round9(s.zb.y)}},
                  {"paths", s.decay_paths},
                  {"bins", s.spec.bins_x / s.decay_coarsen},
                  {"times", times},
                  {"distances", dist},
                  {"log_slope", round9(r.decay.slope)}};
    j["passes"] = r.tv <= tol && r.decay.slope < 0.0;
    return {{"histogram_a.txt", histogram_text(r.a)},
            {"histogram_b.txt", histogram_text(r.b)},
            {"density.svg", density_svg(r.a, "occupation density")},
            {"histogram.json", json_text(j)}};
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    RunConfig tmp;
    while (std::getline(ss, item, ',')) {
        tmp.set_assignment("v=" + item);
        out.push_back(tmp.real("v", 0.0));
    }
    if (out.size() < 2) throw ConfigError("'" + key + "' needs at least two comma-separated values");
    return out;
}

inline int cmd_histogram(const RunConfig& cfg, std::ostream& log) {
    const ModelParams p = model_from(cfg, {-1, -1, 1, 2, 1, 1});
    if (!(p.alpha2 > p.alpha1))
        log << "warning: alpha1 >= alpha2 is the explosive regime; an invariant measure need not exist\n";
    HistogramSettings s;
    s.za = {cfg.real("histogram.xa", s.za.x), cfg.real("histogram.ya", s.za.y)};
    s.zb = {cfg.real("histogram.xb", s.zb.x), cfg.real("histogram.yb", s.zb.y)};
    s.burn_in = cfg.real("histogram.burn_in", s.burn_in);
    s.length = cfg.real("histogram.length", s.length);
    s.dt = cfg.real("histogram.dt", s.dt);
    const double half = cfg.real("histogram.box", 5.0);
    const std::size_t bins = positive_count(cfg, "histogram.bins", 40);
    s.decay_paths = positive_count(cfg, "histogram.decay_paths", s.decay_paths);
    s.decay_coarsen = positive_count(cfg, "histogram.decay_coarsen", s.decay_coarsen);
    if (cfg.has("histogram.decay_times")) s.decay_times = parse_list("histogram.decay_times", cfg.text("histogram.decay_times", ""));
    const double tol = cfg.real("histogram.tv_tol", 0.1);
    if (!(s.burn_in >= 0.0) || !(s.length > 0.0) || !(s.dt > 0.0) || !(half > 0.0))
        throw ConfigError("histogram needs burn_in >= 0 and positive length, dt and box");
    if (bins % s.decay_coarsen != 0) throw ConfigError("histogram.decay_coarsen must divide histogram.bins");
    s.spec = {{-half, half, -half, half}, bins, bins};

    HistogramRun r;
    try {
        r = histogram_run(p, s, run_seed(cfg));
    } catch (const PathExploded& e) {
        log << "FAIL histogram path left through the threshold: " << e.what() << '\n';
        return 1;
    }
    const Outputs files = histogram_outputs(p, s, r, tol);
    write_outputs(out_dir(cfg), files);
    const bool close = r.tv <= tol, decays = r.decay.slope < 0.0;
    log << (close ? "PASS " : "FAIL ") << "tv distance between starts " << fmt9(r.tv) << " <= " << fmt9(tol) << '\n';
    log << (decays ? "PASS " : "FAIL ") << "tv decay slope " << fmt9(r.decay.slope) << " < 0\n";
    return close && decays ? 0 : 1;
}

}  // namespace driftcert
