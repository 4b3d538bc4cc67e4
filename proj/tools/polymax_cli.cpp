#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "polymax/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Newton diagram, maximal operator and weak-type experiments"};
    app.require_subcommand(1);
    auto* run = app.add_subcommand("run", "run verification suites and write reports");
    std::string config;
    run->add_option("--config", config, "key = value config file with [section] headers");
    std::map<std::string, std::string> flags;
    for (const auto& k : polymax::config_keys()) {
        std::string help = k.help;
        if (!k.default_value.empty()) help += " (default " + k.default_value + ")";
        run->add_option_function<std::string>("--" + k.name, [&flags, name = k.name](const std::string& v) { flags[name] = v; }, help);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        std::map<std::string, std::string> values;
        if (!config.empty()) values = polymax::read_config_file(config);
        for (const auto& [k, v] : flags) values[k] = v;
        auto cfg = polymax::make_config(values);
        auto res = polymax::run_experiment(cfg, &std::cout);
        std::cout << (res.status == 0 ? "all suites passed" : "suite failures, see report.json") << " -> " << cfg.out << '\n';
        return res.status;
    } catch (const polymax::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
