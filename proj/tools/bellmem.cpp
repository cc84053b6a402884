// bellmem - run the revival, map, lifetime and crb pipelines from an INI config.
//
// exit codes: 0 success, 2 configuration error, 3 numerical failure

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "bellmem/bellmem.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::string config;
    std::string out;
    bool check = false;
    unsigned threads = 0;
};

bellmem::CsvTable run(bellmem::Command cmd, const bellmem::RunConfig& cfg, unsigned threads) {
    using bellmem::Command;
    switch (cmd) {
        case Command::revival: return bellmem::run_revival(cfg, threads).csv;
        case Command::map: return bellmem::run_map(cfg, threads).csv;
        case Command::lifetime: return bellmem::run_lifetime_scan(cfg, threads).csv;
        case Command::crb: return bellmem::run_crb(cfg).csv;
    }
    return {};
}

int execute(bellmem::Command cmd, const Options& opt) {
    try {
        bellmem::RunConfig cfg = bellmem::load_config(opt.config);
        if (!opt.out.empty()) cfg.output_path = opt.out;
        const bellmem::RunConfig resolved = bellmem::resolve(cfg, cmd);
        if (opt.check) {
            std::cout << bellmem::to_ini(resolved);
            return 0;
        }
        const unsigned threads = opt.threads ? opt.threads : bellmem::default_thread_count();
        const bellmem::CsvTable table = run(cmd, resolved, threads);
        if (resolved.output_path.empty() || resolved.output_path == "-") {
            table.write(std::cout);
        } else {
            std::ofstream os(resolved.output_path, std::ios::binary);
            if (!os) throw bellmem::ConfigError("cannot open output file '" + resolved.output_path + "'");
            table.write(os);
            if (!os) throw bellmem::ConfigError("failed writing '" + resolved.output_path + "'");
        }
        return 0;
    } catch (const bellmem::ConfigError& e) {
        std::cerr << "bellmem: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const bellmem::NumericalError& e) {
        std::cerr << "bellmem: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        std::cerr << "bellmem: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bellmem: config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bell-nonlocality memory effects in waveguide QED"};
    app.set_version_flag("--version", std::string(bellmem::kVersion));
    app.require_subcommand(1);

    Options opt;
    const std::pair<bellmem::Command, const char*> cmds[] = {
        {bellmem::Command::revival, "Discrete-bath revival time series (CHSH, mutual information, trace distance)"},
        {bellmem::Command::map, "BLP and Bell-backflow map over separation d and bandwidth lambda"},
        {bellmem::Command::lifetime, "Dark-state lifetime scan around the antisymmetric node"},
        {bellmem::Command::crb, "Cramer-Rao displacement resolution table"},
    };
    std::vector<std::pair<CLI::App*, bellmem::Command>> subs;
    for (const auto& [cmd, desc] : cmds) {
        CLI::App* sub = app.add_subcommand(bellmem::command_name(cmd), desc);
        sub->add_option("--config", opt.config, "INI configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "CSV output path (default: [output] path, else stdout)");
        sub->add_flag("--check", opt.check, "Validate the config and print the effective configuration");
        sub->add_option("--threads", opt.threads, "Worker threads (default: all cores)")->check(CLI::PositiveNumber);
        subs.emplace_back(sub, cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    for (const auto& [sub, cmd] : subs)
        if (sub->parsed()) return execute(cmd, opt);
    return kExitConfig;
}
