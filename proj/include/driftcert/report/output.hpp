#pragma once

// Text artifacts. Every number goes through fmt9 so reruns are byte-identical.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "driftcert/core/format.hpp"
#include "driftcert/sim/ensemble.hpp"
#include "driftcert/sim/histogram.hpp"
#include "driftcert/sim/phase.hpp"

namespace driftcert {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline std::string json_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline const char* kEnsembleCsvHeader = "alpha1,alpha2,n,n_exploded,fraction,ci_lo,ci_hi,mean_t_exp";

inline std::string ensemble_csv_row(double alpha1, double alpha2, const EnsembleStats& s) {
    std::ostringstream o;
    o << fmt9(alpha1) << ',' << fmt9(alpha2) << ',' << s.n << ',' << s.n_exploded << ','
      << fmt9(s.explosion_fraction) << ',' << fmt9(s.wilson_ci95.first) << ',' << fmt9(s.wilson_ci95.second) << ','
      << (s.mean_t_exp ? fmt9(*s.mean_t_exp) : std::string()) << '\n';
    return o.str();
}

inline std::string ensemble_csv(double alpha1, double alpha2, const EnsembleStats& s) {
    return std::string(kEnsembleCsvHeader) + "\n" + ensemble_csv_row(alpha1, alpha2, s);
}

inline std::string phase_csv(const std::vector<PhaseCell>& cells) {
    std::string out = std::string(kEnsembleCsvHeader) + "\n";
    for (const auto& c : cells) out += ensemble_csv_row(c.alpha1, c.alpha2, c.stats);
    return out;
}

inline std::string trajectory_csv(const Trajectory& tr) {
    std::ostringstream o;
    o << "t,x,y\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        o << fmt9(tr.times[k]) << ',' << fmt9(tr.states[k].x) << ',' << fmt9(tr.states[k].y) << '\n';
    return o.str();
}

// Histogram text format, one record per line, comma separated:
//   x_edges,<nx + 1 ascending values>
//   y_edges,<ny + 1 ascending values>
//   outside,<mass outside the box>
//   mass,<j>,<nx values>        one line per y bin j = 0..ny-1 (row-major)
inline std::string histogram_text(const Histogram2D& h) {
    std::ostringstream o;
    auto list = [&o](const char* tag, const std::vector<double>& v) {
        o << tag;
        for (double x : v) o << ',' << fmt9(x);
        o << '\n';
    };
    list("x_edges", h.x_edges);
    list("y_edges", h.y_edges);
    o << "outside," << fmt9(h.outside) << '\n';
    for (std::size_t j = 0; j < h.ny(); ++j) {
        o << "mass," << j;
        for (std::size_t i = 0; i < h.nx(); ++i) o << ',' << fmt9(h.at(i, j));
        o << '\n';
    }
    return o.str();
}

inline nlohmann::ordered_json to_json(const EnsembleStats& s) {
    nlohmann::ordered_json j;
    j["n"] = s.n;
    j["n_exploded"] = s.n_exploded;
    j["n_failed"] = s.n_failed;
    j["explosion_fraction"] = round9(s.explosion_fraction);
    j["wilson_ci95"] = {round9(s.wilson_ci95.first), round9(s.wilson_ci95.second)};
    j["mean_t_exp"] = s.mean_t_exp ? nlohmann::ordered_json(round9(*s.mean_t_exp)) : nlohmann::ordered_json();
    return j;
}

inline nlohmann::ordered_json to_json(const PathOptions& o) {
    return {{"dt", round9(o.dt)}, {"horizon", round9(o.horizon)}, {"threshold", round9(o.threshold)}};
}

}  // namespace driftcert
