#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <twr/cli.hpp>

namespace {

twr::ConfigFile load_config(const std::string& path) {
    if (path.empty())
        return {};
    std::ifstream in(path);
    if (!in)
        throw twr::ConfigError("cannot open config file '" + path + "'");
    try {
        return twr::ConfigFile::parse(in);
    } catch (const twr::ConfigError& e) {
        throw twr::ConfigError(path + ":" + std::string(e.what()));
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw twr::ConfigError("cannot write output file '" + path + "'");
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum time span scheduling for network-coded two-way relays"};
    app.require_subcommand(1);

    double c1 = 0, c2 = 0, b1 = 0, b2 = 0;
    auto* schedule = app.add_subcommand("schedule", "optimal schedule for fixed link rates");
    schedule->add_option("--c1", c1, "rate of link 1, data units per slot")->required();
    schedule->add_option("--c2", c2, "rate of link 2, data units per slot")->required();
    schedule->add_option("--b1", b1, "data at source 1, data units")->required();
    schedule->add_option("--b2", b2, "data at source 2, data units")->required();

    std::string config_path, out_path;
    twr::cli::CommandOverrides overrides;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    std::vector<double> budgets, ratios;
    unsigned threads = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value config file");
        cmd->add_option("--seed", seed, "master random seed");
        cmd->add_option("--out", out_path, "CSV output path (default: stdout)");
        cmd->add_option("--trials", trials, "Monte-Carlo trials per point");
        cmd->add_option("--threads", threads, "worker threads, 0 = all cores");
    };
    auto* finite = app.add_subcommand("finite-state", "assumed-state policy for finite rate levels");
    auto* psweep = app.add_subcommand("power-sweep", "mean span versus power budget");
    auto* rsweep = app.add_subcommand("ratio-sweep", "mean span versus data ratio b1/b2");
    auto* trace = app.add_subcommand("waterfill-trace", "per-slot trace of one relay episode");
    for (CLI::App* cmd : {finite, psweep, rsweep, trace})
        add_common(cmd);
    finite->get_option("--config")->required();
    psweep->add_option("--budgets", budgets, "budgets in dBm");
    rsweep->add_option("--ratios", ratios, "ratios b1/b2 in [0, 1]");

    CLI11_PARSE(app, argc, argv);

    try {
        if (schedule->parsed()) {
            return twr::cli::cmd_schedule({c1, c2}, {b1, b2}, std::cout);
        }
        for (CLI::App* cmd : {finite, psweep, rsweep, trace}) {
            if (cmd->count("--seed"))
                overrides.seed = seed;
            if (cmd->count("--trials"))
                overrides.trials = trials;
            if (cmd->count("--threads"))
                overrides.threads = threads;
        }
        if (psweep->count("--budgets"))
            overrides.budgets_dbm = budgets;
        if (rsweep->count("--ratios"))
            overrides.ratios = ratios;
        const twr::ConfigFile cfg = twr::cli::merged(load_config(config_path), overrides);

        std::ostringstream csv;
        int rc = 0;
        if (finite->parsed()) {
            rc = twr::cli::cmd_finite_state(cfg, csv);
        } else if (psweep->parsed()) {
            rc = twr::cli::cmd_power_sweep(cfg, csv, out_path.empty() ? std::cerr : std::cout);
        } else if (rsweep->parsed()) {
            rc = twr::cli::cmd_ratio_sweep(cfg, csv, out_path.empty() ? std::cerr : std::cout);
        } else if (trace->parsed()) {
            rc = twr::cli::cmd_waterfill_trace(cfg, csv, std::cerr);
        }
        emit(out_path, csv.str());
        return rc;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
