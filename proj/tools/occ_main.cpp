#include <iostream>

#include "CLI11.hpp"
#include "occ/harness.hpp"

namespace {

struct RunFlags {
    occ::ExperimentConfig config;
    std::string config_file;
    std::vector<std::string> descriptor_names;
    std::vector<std::string> optimizer_names;
};

void add_common_run_flags(CLI::App* cmd, RunFlags& flags) {
    occ::ExperimentConfig& config = flags.config;
    cmd->add_option("--config", flags.config_file,
                    "JSON config file; CLI flags override its values");
    cmd->add_option("--data-dir", config.data_dir, "Directory of CSV datasets");
    cmd->add_option("--label-column", config.label_column, "Name of the label column");
    cmd->add_option("--descriptors", flags.descriptor_names,
                    "Descriptors to run (NND LNND LOF ALP SVM; default all)");
    cmd->add_option("--optimisers,--optimizers", flags.optimizer_names,
                    "Optimisers to run (random hooke-jeeves nelder-mead tpe malherbe-powell; "
                    "default all)");
    cmd->add_option("--budget", config.budget_evaluations, "Max unique evaluations per search");
    cmd->add_option("--proposal-cap", config.budget_proposals, "Max proposals per search");
    cmd->add_option("--folds", config.outer_folds, "Outer cross-validation folds");
    cmd->add_option("--min-class-size", config.min_class_size, "Minimum class size for a problem");
    cmd->add_option("--seed", config.seed, "Master seed");
    cmd->add_option("--out", config.out_dir, "Output directory for records");
    cmd->add_option("--jobs", config.jobs, "Parallel work units");
}

occ::ExperimentConfig merged_config(const RunFlags& flags) {
    occ::ExperimentConfig cli_config = flags.config;
    for (const auto& v : flags.descriptor_names)
        cli_config.descriptors.push_back(occ::descriptor_from_string(v));
    for (const auto& v : flags.optimizer_names)
        cli_config.optimizers.push_back(occ::optimizer_from_string(v));
    if (flags.config_file.empty()) return cli_config;
    occ::ExperimentConfig base = occ::ExperimentConfig::from_json_file(flags.config_file);
    // Non-default CLI values win over file values.
    const occ::ExperimentConfig defaults;
    auto pick = [](const auto& cli, const auto& def, const auto& file) {
        return cli != def ? cli : file;
    };
    base.data_dir = pick(cli_config.data_dir, defaults.data_dir, base.data_dir);
    base.label_column = pick(cli_config.label_column, defaults.label_column, base.label_column);
    if (!cli_config.descriptors.empty()) base.descriptors = cli_config.descriptors;
    if (!cli_config.optimizers.empty()) base.optimizers = cli_config.optimizers;
    base.budget_evaluations =
        pick(cli_config.budget_evaluations, defaults.budget_evaluations, base.budget_evaluations);
    base.budget_proposals =
        pick(cli_config.budget_proposals, defaults.budget_proposals, base.budget_proposals);
    base.outer_folds = pick(cli_config.outer_folds, defaults.outer_folds, base.outer_folds);
    base.min_class_size =
        pick(cli_config.min_class_size, defaults.min_class_size, base.min_class_size);
    base.seed = pick(cli_config.seed, defaults.seed, base.seed);
    base.out_dir = pick(cli_config.out_dir, defaults.out_dir, base.out_dir);
    base.jobs = pick(cli_config.jobs, defaults.jobs, base.jobs);
    return base;
}

int do_run(const occ::ExperimentConfig& config) {
    const auto summary = occ::run_experiment(config);
    std::cout << "completed " << summary.completed << ", skipped " << summary.skipped
              << ", failed " << summary.failures.size() << "\n";
    for (const auto& f : summary.failures) std::cerr << "FAILED " << f << "\n";
    return summary.failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"One-class classification toolkit: descriptors, hyperparameter "
                 "optimisation, and experiment analysis"};
    app.require_subcommand(1);

    RunFlags run_flags, defaults_flags;
    auto* run_cmd = app.add_subcommand("run", "Run the experiment grid");
    add_common_run_flags(run_cmd, run_flags);

    auto* defaults_cmd =
        app.add_subcommand("defaults", "Evaluate default hyperparameter values only");
    add_common_run_flags(defaults_cmd, defaults_flags);

    std::string records_dir, baseline_dir, analyze_out, headline = "malherbe-powell";
    auto* analyze_cmd = app.add_subcommand("analyze", "Produce analysis artifacts from records");
    analyze_cmd->add_option("--records", records_dir, "Directory of record files")->required();
    analyze_cmd->add_option("--baseline", baseline_dir,
                            "Optional defaults-only records directory; default values embedded "
                            "in the run records are used when omitted");
    analyze_cmd->add_option("--out", analyze_out, "Output directory")->required();
    analyze_cmd->add_option("--headline-optimiser", headline,
                            "Optimiser whose records drive the descriptor comparison");

    std::string rt_records, rt_out;
    auto* rt_cmd = app.add_subcommand("runtime-report", "Mean wall-clock per evaluation count");
    rt_cmd->add_option("--records", rt_records, "Directory of record files")->required();
    rt_cmd->add_option("--out", rt_out, "Output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return do_run(merged_config(run_flags));
        if (defaults_cmd->parsed()) {
            occ::ExperimentConfig c = merged_config(defaults_flags);
            c.defaults_only = true;
            c.optimizers = {occ::OptimizerKind::Random};  // placeholder id in record keys
            return do_run(c);
        }
        if (analyze_cmd->parsed()) {
            auto records = occ::load_records(records_dir);
            if (!baseline_dir.empty()) {
                // Merge baseline default AUROCs into the run records by key.
                auto baseline = occ::load_records(baseline_dir);
                std::map<std::string, const occ::ExperimentRecord*> by_unit;
                for (const auto& b : baseline)
                    by_unit[b.problem_id + "#" + std::to_string(b.fold_id) + "#" +
                            occ::to_string(b.descriptor)] = &b;
                for (auto& r : records) {
                    const auto it = by_unit.find(r.problem_id + "#" + std::to_string(r.fold_id) +
                                                 "#" + occ::to_string(r.descriptor));
                    if (it != by_unit.end()) {
                        r.default_test_auroc = it->second->default_test_auroc;
                        r.default_validation_auroc = it->second->default_validation_auroc;
                    }
                }
            }
            occ::AnalysisOptions opts;
            opts.headline_optimizer = occ::optimizer_from_string(headline);
            occ::analyze(records, analyze_out, opts);
            return 0;
        }
        if (rt_cmd->parsed()) {
            occ::report_runtime(occ::load_records(rt_records), rt_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
