//
// Command line front end: subcommands map onto the config modes, flags
// mirror config keys, and a --config file supplies defaults that any
// explicitly passed flag overrides.
//

#include <CLI11.hpp>

#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "sosdict/config.hpp"
#include "sosdict/runner.hpp"
#include "sosdict/serialize.hpp"

namespace {

using sosdict::cli::ExperimentConfig;

// staging area for flag values; only flags the user actually passed are
// copied into the config, so config-file values survive untouched
struct FlagSet {
    ExperimentConfig staged;
    std::string config_path;
    std::string seeds_text;
    std::string grid_tau_text, grid_n_text, grid_m_text, grid_d_text, grid_k_text;
    std::vector<std::function<void(ExperimentConfig&)>> appliers;
};

void track(FlagSet& fs, CLI::Option* opt, std::function<void(ExperimentConfig&)> apply) {
    fs.appliers.push_back([opt, apply = std::move(apply)](ExperimentConfig& cfg) {
        if (opt->count() > 0) apply(cfg);
    });
}

template <class T>
void add_value_flag(CLI::App* cmd, FlagSet& fs, const std::string& name, T& slot,
                    T ExperimentConfig::* member, const std::string& help) {
    CLI::Option* opt = cmd->add_option(name, slot, help);
    track(fs, opt, [&slot, member](ExperimentConfig& cfg) { cfg.*member = slot; });
}

void add_bool_flag(CLI::App* cmd, FlagSet& fs, const std::string& name, bool& slot,
                   bool ExperimentConfig::* member, const std::string& help) {
    CLI::Option* opt = cmd->add_flag(name, slot, help);
    track(fs, opt, [&slot, member](ExperimentConfig& cfg) { cfg.*member = slot; });
}

// comma lists reuse the config-file parser so both spellings stay in sync
void add_list_flag(CLI::App* cmd, FlagSet& fs, const std::string& name, const std::string& key,
                   std::string& slot, const std::string& help) {
    CLI::Option* opt = cmd->add_option(name, slot, help);
    track(fs, opt, [&slot, key](ExperimentConfig& cfg) {
        std::istringstream line(key + " = " + slot + "\n");
        ExperimentConfig parsed = sosdict::cli::parse_config(line, "<flag " + key + ">");
        if (key == "seeds") cfg.seeds = parsed.seeds;
        else if (key == "grid_tau") cfg.grid_tau = parsed.grid_tau;
        else if (key == "grid_n") cfg.grid_n = parsed.grid_n;
        else if (key == "grid_m") cfg.grid_m = parsed.grid_m;
        else if (key == "grid_d") cfg.grid_d = parsed.grid_d;
        else cfg.grid_k = parsed.grid_k;
    });
}

void register_flags(CLI::App* cmd, FlagSet& fs) {
    ExperimentConfig& s = fs.staged;
    cmd->add_option("--config", fs.config_path, "config file providing defaults; flags win");
    add_value_flag(cmd, fs, "--n", s.n, &ExperimentConfig::n, "ambient dimension");
    add_value_flag(cmd, fs, "--m", s.m, &ExperimentConfig::m, "dictionary columns");
    add_value_flag(cmd, fs, "--d", s.d, &ExperimentConfig::d, "polynomial degree (even)");
    add_value_flag(cmd, fs, "--k", s.k, &ExperimentConfig::k, "moment degree (even, >= d)");
    add_value_flag(cmd, fs, "--tau", s.tau, &ExperimentConfig::tau, "niceness level");
    add_value_flag(cmd, fs, "--epsilon", s.epsilon, &ExperimentConfig::epsilon,
                   "recovery accuracy target");
    add_value_flag(cmd, fs, "--gamma", s.gamma, &ExperimentConfig::gamma,
                   "separation (negative picks 20*epsilon)");
    add_value_flag(cmd, fs, "--noise", s.noise, &ExperimentConfig::noise,
                   "decomposition residual allowance");
    add_value_flag(cmd, fs, "--num-samples", s.num_samples, &ExperimentConfig::num_samples,
                   "sample count N");
    add_bool_flag(cmd, fs, "--orthonormalize", s.orthonormalize,
                  &ExperimentConfig::orthonormalize, "orthonormalize generated columns");
    add_value_flag(cmd, fs, "--sdp-tol", s.sdp_tol, &ExperimentConfig::sdp_tol,
                   "solver convergence tolerance");
    add_value_flag(cmd, fs, "--sdp-max-iters", s.sdp_max_iters, &ExperimentConfig::sdp_max_iters,
                   "solver iteration cap");
    add_value_flag(cmd, fs, "--retries", s.retries, &ExperimentConfig::retries,
                   "rounding retries per column");
    add_value_flag(cmd, fs, "--max-columns", s.max_columns, &ExperimentConfig::max_columns,
                   "column budget");
    add_value_flag(cmd, fs, "--conditioning", s.conditioning, &ExperimentConfig::conditioning,
                   "reweighing scale M");
    add_value_flag(cmd, fs, "--strategy", s.strategy, &ExperimentConfig::strategy,
                   "rounding strategy: eigenvector or gaussian");
    add_bool_flag(cmd, fs, "--refined", s.refined, &ExperimentConfig::refined,
                  "reweigh around drawn samples");
    add_list_flag(cmd, fs, "--seeds", "seeds", fs.seeds_text, "comma separated seed list");
    add_value_flag(cmd, fs, "--input-dict", s.input_dict, &ExperimentConfig::input_dict,
                   "truth dictionary for scoring");
    add_value_flag(cmd, fs, "--input-samples", s.input_samples, &ExperimentConfig::input_samples,
                   "sample batch to learn from");
    add_value_flag(cmd, fs, "--input-poly", s.input_poly, &ExperimentConfig::input_poly,
                   "polynomial to decompose");
    add_value_flag(cmd, fs, "--out-dict", s.out_dict, &ExperimentConfig::out_dict,
                   "where gen writes the dictionary");
    add_value_flag(cmd, fs, "--out-samples", s.out_samples, &ExperimentConfig::out_samples,
                   "where gen writes the samples");
    add_value_flag(cmd, fs, "--out-poly", s.out_poly, &ExperimentConfig::out_poly,
                   "where gen writes the empirical polynomial");
    add_value_flag(cmd, fs, "--out-recovered", s.out_recovered, &ExperimentConfig::out_recovered,
                   "where recovery writes its vectors");
    add_value_flag(cmd, fs, "--report", s.report, &ExperimentConfig::report,
                   "CSV report path (stdout when omitted)");
    add_list_flag(cmd, fs, "--grid-tau", "grid_tau", fs.grid_tau_text, "bench grid over tau");
    add_list_flag(cmd, fs, "--grid-n", "grid_n", fs.grid_n_text, "bench grid over n");
    add_list_flag(cmd, fs, "--grid-m", "grid_m", fs.grid_m_text, "bench grid over m");
    add_list_flag(cmd, fs, "--grid-d", "grid_d", fs.grid_d_text, "bench grid over d");
    add_list_flag(cmd, fs, "--grid-k", "grid_k", fs.grid_k_text, "bench grid over k");
    add_value_flag(cmd, fs, "--amgm-n", s.amgm_n, &ExperimentConfig::amgm_n,
                   "verify the power-mean chain at this size");
    add_value_flag(cmd, fs, "--monomial", s.monomial, &ExperimentConfig::monomial,
                   "verify one monomial certificate, e.g. \"2 1 1\"");
    add_value_flag(cmd, fs, "--holder", s.holder, &ExperimentConfig::holder,
                   "verify one degree-lift bundle as \"n d s\"");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sum-of-squares dictionary learning and tensor decomposition harness"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> modes = {
        {"gen", "generate a dictionary and synthetic samples"},
        {"learn", "recover dictionary columns from samples"},
        {"decompose", "decompose a polynomial into near rank-one directions"},
        {"certify", "verify exact nonnegativity certificates"},
        {"bench", "sweep a parameter grid and report recovery rates"},
    };
    std::vector<std::unique_ptr<FlagSet>> flag_sets;
    std::vector<CLI::App*> cmds;
    for (const auto& [name, help] : modes) {
        CLI::App* cmd = app.add_subcommand(name, help);
        flag_sets.push_back(std::make_unique<FlagSet>());
        register_flags(cmd, *flag_sets.back());
        cmds.push_back(cmd);
    }

    CLI11_PARSE(app, argc, argv);

    int code = sosdict::cli::kExitOk;
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        if (!cmds[i]->parsed()) continue;
        FlagSet& fs = *flag_sets[i];
        ExperimentConfig cfg;
        try {
            if (!fs.config_path.empty()) cfg = sosdict::cli::load_config(fs.config_path);
            for (const auto& apply : fs.appliers) apply(cfg);
            cfg.mode = modes[i].first;
        } catch (const sosdict::ParseError& e) {
            std::cerr << e.what() << "\n";
            return sosdict::cli::kExitBadConfig;
        } catch (const sosdict::IoError& e) {
            std::cerr << e.what() << "\n";
            return e.missing() ? sosdict::cli::kExitMissingInput : sosdict::cli::kExitIo;
        }
        sosdict::cli::Report report;
        code = sosdict::cli::run(cfg, report, std::cerr);
        if (cfg.report.empty()) sosdict::cli::write_report_csv(std::cout, report);
    }
    return code;
}
