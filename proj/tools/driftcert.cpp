#include <charconv>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "driftcert/report/commands.hpp"

using namespace driftcert;

namespace {

using Command = std::function<int(const RunConfig&, std::ostream&)>;

struct CommonFlags {
    std::optional<std::string> config;
    std::map<std::string, std::optional<double>> model{{"a1", {}},     {"a2", {}},     {"alpha1", {}},
                                                       {"alpha2", {}}, {"kappa1", {}}, {"kappa2", {}}};
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::vector<std::string> assignments;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    for (auto& [name, value] : f.model) sub->add_option("--" + name, value, "model parameter " + name);
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--out-dir", f.out_dir, "directory for output files");
    sub->add_option("--config", f.config, "sectioned key = value config file");
    sub->add_option("--set", f.assignments, "override one config key, section.key=value")->take_all();
}

std::string exact(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

RunConfig build_config(const CommonFlags& f) {
    RunConfig cfg = f.config ? RunConfig::from_file(*f.config) : RunConfig{};
    for (const auto& a : f.assignments) cfg.set_assignment(a);
    for (const auto& [name, value] : f.model)
        if (value) cfg.set("model." + name, exact(*value));
    if (f.seed) cfg.set("run.seed", std::to_string(*f.seed));
    if (f.out_dir) cfg.set("run.out_dir", *f.out_dir);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certify and simulate the planar quadratic SDE family"};
    app.require_subcommand(1);
    const std::vector<std::pair<std::string, Command>> commands{
        {"verify-lyapunov", cmd_verify_lyapunov},
        {"explosion", cmd_explosion},
        {"phase", cmd_phase},
        {"brackets", cmd_brackets},
        {"histogram", cmd_histogram},
    };
    const std::map<std::string, std::string> help{
        {"verify-lyapunov", "build and certify the Lyapunov covering (ergodic regime)"},
        {"explosion", "wedge, instability certificate, blow-up bounds and ensemble (explosive regime)"},
        {"phase", "explosion fractions over an (alpha1, alpha2) grid"},
        {"brackets", "Lie brackets and Hoermander ranks"},
        {"histogram", "occupation histograms from two starts and their TV distance"},
    };
    std::vector<CommonFlags> flags(commands.size());
    std::vector<CLI::App*> subs;
    for (std::size_t k = 0; k < commands.size(); ++k) {
        subs.push_back(app.add_subcommand(commands[k].first, help.at(commands[k].first)));
        add_common(subs.back(), flags[k]);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    for (std::size_t k = 0; k < commands.size(); ++k) {
        if (!subs[k]->parsed()) continue;
        try {
            return commands[k].second(build_config(flags[k]), std::cout);
        } catch (const ConfigError& e) {
            std::cerr << "driftcert " << commands[k].first << ": " << e.what() << '\n';
            return 2;
        } catch (const std::invalid_argument& e) {
            std::cerr << "driftcert " << commands[k].first << ": " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "driftcert " << commands[k].first << ": " << e.what() << '\n';
            return 1;
        }
    }
    return 2;
}
