#include "occ/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "occ/rng.hpp"
#include "occ/validation.hpp"

namespace fs = std::filesystem;

namespace occ {

namespace {

std::vector<DescriptorKind> all_descriptors() {
    return {DescriptorKind::NND, DescriptorKind::LNND, DescriptorKind::LOF, DescriptorKind::ALP,
            DescriptorKind::SVM};
}

std::vector<OptimizerKind> all_optimizers() {
    return {OptimizerKind::Random, OptimizerKind::HookeJeeves, OptimizerKind::NelderMead,
            OptimizerKind::Tpe, OptimizerKind::MalherbePowell};
}

std::string sanitise(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return s;
}

nlohmann::json params_to_json(DescriptorKind kind, const HyperParams& p) {
    switch (kind) {
        case DescriptorKind::NND:
        case DescriptorKind::LNND:
        case DescriptorKind::LOF:
            return {{"k", p.k}};
        case DescriptorKind::ALP:
            return {{"k", p.k}, {"l", p.l}};
        case DescriptorKind::SVM:
            return {{"nu", p.nu}, {"c_prime", p.c_prime}};
    }
    throw std::logic_error("params_to_json: bad kind");
}

HyperParams params_from_json(const nlohmann::json& j) {
    HyperParams p;
    if (j.contains("k")) p.k = j["k"].get<std::size_t>();
    if (j.contains("l")) p.l = j["l"].get<std::size_t>();
    if (j.contains("nu")) p.nu = j["nu"].get<double>();
    if (j.contains("c_prime")) p.c_prime = j["c_prime"].get<double>();
    return p;
}

}  // namespace

void ExperimentConfig::finalise() {
    if (descriptors.empty()) descriptors = all_descriptors();
    if (optimizers.empty()) optimizers = all_optimizers();
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    nlohmann::json j;
    in >> j;
    ExperimentConfig c;
    if (j.contains("data_dir")) c.data_dir = j["data_dir"].get<std::string>();
    if (j.contains("label_column")) c.label_column = j["label_column"].get<std::string>();
    if (j.contains("descriptors"))
        for (const auto& d : j["descriptors"])
            c.descriptors.push_back(descriptor_from_string(d.get<std::string>()));
    if (j.contains("optimizers"))
        for (const auto& o : j["optimizers"])
            c.optimizers.push_back(optimizer_from_string(o.get<std::string>()));
    if (j.contains("budget")) c.budget_evaluations = j["budget"].get<std::size_t>();
    if (j.contains("proposal_cap")) c.budget_proposals = j["proposal_cap"].get<std::size_t>();
    if (j.contains("folds")) c.outer_folds = j["folds"].get<std::size_t>();
    if (j.contains("min_class_size")) c.min_class_size = j["min_class_size"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<std::size_t>();
    return c;
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["data_dir"] = data_dir;
    j["label_column"] = label_column;
    std::vector<std::string> ds, os;
    for (auto d : descriptors) ds.push_back(to_string(d));
    for (auto o : optimizers) os.push_back(to_string(o));
    j["descriptors"] = ds;
    j["optimizers"] = os;
    j["budget"] = budget_evaluations;
    j["proposal_cap"] = budget_proposals;
    j["folds"] = outer_folds;
    j["min_class_size"] = min_class_size;
    j["seed"] = seed;
    j["out"] = out_dir;
    j["jobs"] = jobs;
    return j.dump(2);
}

std::string ExperimentRecord::key() const {
    return sanitise(dataset_id) + "__" + sanitise(problem_id) + "__f" + std::to_string(fold_id) +
           "__" + sanitise(to_string(descriptor)) + "__" + sanitise(to_string(optimizer));
}

std::string ExperimentRecord::to_json() const {
    nlohmann::json j;
    j["problem_id"] = problem_id;
    j["dataset_id"] = dataset_id;
    j["fold_id"] = fold_id;
    j["descriptor"] = to_string(descriptor);
    j["optimizer"] = to_string(optimizer);
    j["validation_auroc"] = validation_auroc;
    j["test_auroc"] = test_auroc;
    nlohmann::json inc = nlohmann::json::array();
    for (const auto& p : incumbent_params) inc.push_back(params_to_json(descriptor, p));
    j["incumbent_params"] = inc;
    j["default_validation_auroc"] = default_validation_auroc;
    j["default_test_auroc"] = default_test_auroc;
    j["default_params"] = params_to_json(descriptor, default_params_used);
    j["proposals"] = proposals;
    j["evaluations"] = evaluations;
    j["eval_seconds"] = eval_seconds;
    return j.dump(2);
}

ExperimentRecord ExperimentRecord::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ExperimentRecord r;
    r.problem_id = j.at("problem_id").get<std::string>();
    r.dataset_id = j.at("dataset_id").get<std::string>();
    r.fold_id = j.at("fold_id").get<std::size_t>();
    r.descriptor = descriptor_from_string(j.at("descriptor").get<std::string>());
    r.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
    r.validation_auroc = j.at("validation_auroc").get<std::vector<double>>();
    r.test_auroc = j.at("test_auroc").get<std::vector<double>>();
    for (const auto& p : j.at("incumbent_params")) r.incumbent_params.push_back(params_from_json(p));
    r.default_validation_auroc = j.at("default_validation_auroc").get<double>();
    r.default_test_auroc = j.at("default_test_auroc").get<double>();
    r.default_params_used = params_from_json(j.at("default_params"));
    r.proposals = j.at("proposals").get<std::size_t>();
    r.evaluations = j.at("evaluations").get<std::size_t>();
    if (j.contains("eval_seconds")) r.eval_seconds = j.at("eval_seconds").get<std::vector<double>>();
    return r;
}

namespace {

struct WorkUnit {
    const Dataset* dataset = nullptr;
    const ClassPartition* partition = nullptr;
    std::size_t fold_id = 0;
    FoldSplit fold;
    DescriptorKind descriptor;
    OptimizerKind optimizer;
};

OneClassProblem scaled_problem(const Dataset& d, const ClassPartition& part,
                               const FoldSplit& fold) {
    OneClassProblem p = make_problem(d, part, fold);
    const ScalingProfile scaling = fit_iqr_scaling(p.target_train);
    p.target_train = scaling.apply(p.target_train);
    p.train_features = scaling.apply(p.train_features);
    p.test_features = scaling.apply(p.test_features);
    return p;
}

HyperParams clamped_defaults(DescriptorKind kind, const SearchDomain& domain, std::size_t n) {
    HyperParams p = default_params(kind, n);
    if (kind != DescriptorKind::SVM) {
        p.k = std::min(std::max<std::size_t>(p.k, 1), domain.k_max);
        if (kind == DescriptorKind::ALP) p.l = std::min(std::max<std::size_t>(p.l, 1), domain.l_max);
    }
    return p;
}

double test_auroc_for(const OneClassProblem& p, DescriptorKind kind, const HyperParams& params) {
    const auto model = fit_descriptor(kind, p.target_train, params);
    const auto scores = model->score_all(p.test_features);
    std::vector<double> ts, os;
    for (std::size_t i = 0; i < scores.size(); ++i)
        (p.test_is_target[i] ? ts : os).push_back(scores[i]);
    return auroc(ts, os);
}

ExperimentRecord run_unit(const ExperimentConfig& config, const WorkUnit& unit) {
    const OneClassProblem problem = scaled_problem(*unit.dataset, *unit.partition, unit.fold);

    ExperimentRecord rec;
    rec.problem_id = problem.id();
    rec.dataset_id = problem.dataset_name;
    rec.fold_id = unit.fold_id;
    rec.descriptor = unit.descriptor;
    rec.optimizer = unit.optimizer;

    const std::uint64_t unit_seed =
        mix_seed(mix_seed(mix_seed(config.seed, hash_tag(rec.problem_id)), unit.fold_id),
                 hash_tag(to_string(unit.descriptor)));
    ObjectiveHandle handle(problem, unit.descriptor, unit_seed);
    const std::size_t n = problem.target_train.rows();
    rec.default_params_used = clamped_defaults(unit.descriptor, handle.domain(), n);
    rec.default_validation_auroc = handle.evaluate_params(rec.default_params_used);
    rec.default_test_auroc = test_auroc_for(problem, unit.descriptor, rec.default_params_used);

    Budget budget;
    budget.max_evaluations = config.budget_evaluations;
    budget.max_proposals = config.budget_proposals;
    budget.seed = mix_seed(unit_seed, hash_tag(to_string(unit.optimizer)));

    // Wrap the handle with per-evaluation wall-clock timing.
    std::vector<double> eval_seconds;
    auto timed_fn = [&handle, &eval_seconds](std::vector<double> coords) {
        const auto t0 = std::chrono::steady_clock::now();
        EvalOutcome out = handle.propose(std::move(coords));
        const auto t1 = std::chrono::steady_clock::now();
        if (!out.cache_hit)
            eval_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
        return out;
    };

    const std::vector<double> start = handle.domain().encode(rec.default_params_used);
    SearchResult result;
    {
        BudgetedObjective obj(timed_fn, handle.domain().dims, budget);
        switch (unit.optimizer) {
            case OptimizerKind::Random: run_random_search(obj); break;
            case OptimizerKind::HookeJeeves: run_hooke_jeeves(obj, start); break;
            case OptimizerKind::NelderMead: run_nelder_mead(obj, start); break;
            case OptimizerKind::Tpe: run_tpe(obj); break;
            case OptimizerKind::MalherbePowell: run_malherbe_powell(obj); break;
        }
        result = finish_search(obj);
        rec.proposals = obj.proposals();
        rec.evaluations = obj.evaluations();
    }
    rec.eval_seconds = std::move(eval_seconds);

    // Test AUROC per evaluation count: refit only when the incumbent changes.
    std::string last_key;
    double last_test = 0.0;
    for (const auto& inc : result.incumbent_by_eval) {
        rec.validation_auroc.push_back(inc.value);
        rec.incumbent_params.push_back(inc.params);
        const std::string k = handle.domain().key(inc.params);
        if (k != last_key) {
            last_test = test_auroc_for(problem, unit.descriptor, inc.params);
            last_key = k;
        }
        rec.test_auroc.push_back(last_test);
    }
    return rec;
}

ExperimentRecord run_defaults_unit(const ExperimentConfig& config, const WorkUnit& unit) {
    const OneClassProblem problem = scaled_problem(*unit.dataset, *unit.partition, unit.fold);
    ExperimentRecord rec;
    rec.problem_id = problem.id();
    rec.dataset_id = problem.dataset_name;
    rec.fold_id = unit.fold_id;
    rec.descriptor = unit.descriptor;
    rec.optimizer = unit.optimizer;
    const std::uint64_t unit_seed =
        mix_seed(mix_seed(mix_seed(config.seed, hash_tag(rec.problem_id)), unit.fold_id),
                 hash_tag(to_string(unit.descriptor)));
    ObjectiveHandle handle(problem, unit.descriptor, unit_seed);
    rec.default_params_used =
        clamped_defaults(unit.descriptor, handle.domain(), problem.target_train.rows());
    rec.default_validation_auroc = handle.evaluate_params(rec.default_params_used);
    rec.default_test_auroc = test_auroc_for(problem, unit.descriptor, rec.default_params_used);
    return rec;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config_in) {
    ExperimentConfig config = config_in;
    config.finalise();
    if (config.out_dir.empty()) throw std::invalid_argument("run_experiment: out_dir required");
    fs::create_directories(config.out_dir);

    std::vector<Dataset> datasets;
    std::vector<fs::path> csvs;
    for (const auto& entry : fs::directory_iterator(config.data_dir))
        if (entry.path().extension() == ".csv") csvs.push_back(entry.path());
    std::sort(csvs.begin(), csvs.end());
    for (const auto& p : csvs)
        datasets.push_back(load_csv(p.string(), config.label_column));

    std::vector<std::vector<ClassPartition>> partitions(datasets.size());
    for (std::size_t i = 0; i < datasets.size(); ++i)
        partitions[i] = derive_problems(datasets[i], config.min_class_size);

    std::vector<WorkUnit> units;
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        for (const auto& part : partitions[di]) {
            const std::string pid = datasets[di].name + "/" + part.target_class;
            std::vector<bool> is_target(datasets[di].features.rows(), false);
            for (auto r : part.target_rows) is_target[r] = true;
            const auto folds = stratified_kfold(is_target, config.outer_folds,
                                                mix_seed(config.seed, hash_tag(pid)));
            for (std::size_t f = 0; f < folds.size(); ++f) {
                for (auto d : config.descriptors) {
                    for (auto o : config.optimizers) {
                        WorkUnit u;
                        u.dataset = &datasets[di];
                        u.partition = &part;
                        u.fold_id = f;
                        u.fold = folds[f];
                        u.descriptor = d;
                        u.optimizer = o;
                        units.push_back(std::move(u));
                        if (config.defaults_only) break;  // optimiser irrelevant
                    }
                }
            }
        }
    }

    RunSummary summary;
    std::mutex mtx;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= units.size()) return;
            const WorkUnit& u = units[i];
            ExperimentRecord probe;
            probe.problem_id = u.dataset->name + "/" + u.partition->target_class;
            probe.dataset_id = u.dataset->name;
            probe.fold_id = u.fold_id;
            probe.descriptor = u.descriptor;
            probe.optimizer = u.optimizer;
            const fs::path out = fs::path(config.out_dir) / (probe.key() + ".json");
            if (fs::exists(out)) {
                std::lock_guard lock(mtx);
                ++summary.skipped;
                continue;
            }
            try {
                const ExperimentRecord rec = config.defaults_only ? run_defaults_unit(config, u)
                                                                  : run_unit(config, u);
                const fs::path tmp = out.string() + ".tmp";
                {
                    std::ofstream f(tmp);
                    f << rec.to_json() << "\n";
                }
                fs::rename(tmp, out);
                std::lock_guard lock(mtx);
                ++summary.completed;
            } catch (const std::exception& e) {
                std::lock_guard lock(mtx);
                summary.failures.push_back(probe.key() + ": " + e.what());
            }
        }
    };

    const std::size_t jobs = std::max<std::size_t>(1, config.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return summary;
}

std::vector<ExperimentRecord> load_records(const std::string& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<ExperimentRecord> out;
    for (const auto& p : files) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        out.push_back(ExperimentRecord::from_json(ss.str()));
    }
    return out;
}

namespace {

// Value at evaluation count e (1-based), forward-filled past the end.
double at_eval(const std::vector<double>& v, std::size_t e) {
    if (v.empty()) throw std::runtime_error("at_eval: empty curve");
    return v[std::min(e, v.size()) - 1];
}

struct ProblemCurves {
    std::string dataset_id;
    // descriptor -> per-eval mean over folds
    std::map<DescriptorKind, std::vector<double>> validation;
    std::map<DescriptorKind, std::vector<double>> test;
    std::map<DescriptorKind, double> default_test;
    std::map<DescriptorKind, double> default_validation;
    // per-fold final values, for the ALP/SVM per-fold selector
    std::map<DescriptorKind, std::vector<double>> fold_final_val;
    std::map<DescriptorKind, std::vector<double>> fold_final_test;
};

}  // namespace

void analyze(const std::vector<ExperimentRecord>& records, const std::string& out_dir,
             const AnalysisOptions& options) {
    if (records.empty()) throw std::invalid_argument("analyze: no records");
    fs::create_directories(out_dir);

    std::size_t max_e = 1;
    for (const auto& r : records) max_e = std::max(max_e, r.validation_auroc.size());

    // Group the headline optimiser's records per problem, averaging folds.
    std::set<DescriptorKind> descriptors;
    std::map<std::string, std::map<DescriptorKind, std::vector<const ExperimentRecord*>>> grid;
    for (const auto& r : records) {
        if (r.optimizer != options.headline_optimizer) continue;
        grid[r.problem_id][r.descriptor].push_back(&r);
        descriptors.insert(r.descriptor);
    }
    if (grid.empty()) throw std::invalid_argument("analyze: no records for headline optimizer");

    // Common-grid check: every problem must cover every descriptor seen.
    std::vector<std::string> missing;
    for (const auto& [pid, by_desc] : grid)
        for (auto d : descriptors)
            if (!by_desc.count(d)) missing.push_back(pid + ":" + to_string(d));
    if (!missing.empty()) {
        std::string msg = "analyze: mismatched grids, missing keys:";
        for (const auto& k : missing) msg += " " + k;
        throw std::runtime_error(msg);
    }

    std::vector<ProblemCurves> problems;
    std::vector<std::string> problem_ids, dataset_ids;
    for (const auto& [pid, by_desc] : grid) {
        ProblemCurves pc;
        pc.dataset_id = by_desc.begin()->second.front()->dataset_id;
        for (const auto& [desc, recs] : by_desc) {
            std::vector<double> val(max_e, 0.0), test(max_e, 0.0);
            double dval = 0.0, dtest = 0.0;
            for (const auto* r : recs) {
                for (std::size_t e = 1; e <= max_e; ++e) {
                    val[e - 1] += at_eval(r->validation_auroc, e);
                    test[e - 1] += at_eval(r->test_auroc, e);
                }
                dval += r->default_validation_auroc;
                dtest += r->default_test_auroc;
                pc.fold_final_val[desc].push_back(r->validation_auroc.back());
                pc.fold_final_test[desc].push_back(r->test_auroc.back());
            }
            const auto nf = static_cast<double>(recs.size());
            for (auto& v : val) v /= nf;
            for (auto& v : test) v /= nf;
            pc.validation[desc] = std::move(val);
            pc.test[desc] = std::move(test);
            pc.default_validation[desc] = dval / nf;
            pc.default_test[desc] = dtest / nf;
        }
        problems.push_back(std::move(pc));
        problem_ids.push_back(pid);
        dataset_ids.push_back(problems.back().dataset_id);
    }
    const auto weights = dataset_equal_weights(problem_ids, dataset_ids);

    auto wmean = [&](const std::function<double(const ProblemCurves&)>& get) {
        std::vector<double> vals(problems.size());
        for (std::size_t i = 0; i < problems.size(); ++i) vals[i] = get(problems[i]);
        return weighted_mean(vals, weights);
    };

    // (a) weighted mean validation/test AUROC per descriptor per eval count,
    // (b) overfitting gap.
    {
        std::ofstream curves(fs::path(out_dir) / "mean_auroc_by_eval.csv");
        curves << "descriptor,evaluations,weighted_validation_auroc,weighted_test_auroc\n";
        std::ofstream gap(fs::path(out_dir) / "overfitting_gap.csv");
        gap << "descriptor,evaluations,gap_validation_minus_test\n";
        for (auto d : descriptors) {
            for (std::size_t e = 1; e <= max_e; ++e) {
                const double v =
                    wmean([&](const ProblemCurves& p) { return p.validation.at(d)[e - 1]; });
                const double t = wmean([&](const ProblemCurves& p) { return p.test.at(d)[e - 1]; });
                curves << to_string(d) << "," << e << "," << v << "," << t << "\n";
                gap << to_string(d) << "," << e << "," << (v - t) << "\n";
            }
        }
    }

    auto pairwise_p = [&](DescriptorKind a, DescriptorKind b, std::size_t e) {
        std::vector<PairedSample> sample(problems.size());
        for (std::size_t i = 0; i < problems.size(); ++i) {
            sample[i].difference = problems[i].test.at(a)[e - 1] - problems[i].test.at(b)[e - 1];
            sample[i].cluster_id = problems[i].dataset_id;
        }
        return clustered_wilcoxon(sample, Alternative::Greater);
    };

    // (c) pairwise one-sided tests per evaluation count + final Holm table.
    {
        std::ofstream pw(fs::path(out_dir) / "pairwise_tests.csv");
        pw << "evaluations,row_descriptor,col_descriptor,p_value,p_holm_row\n";
        std::vector<DescriptorKind> ds(descriptors.begin(), descriptors.end());
        std::ostringstream md;
        md << "# Pairwise one-sided clustered Wilcoxon tests (row > column)\n\n";
        md << "Holm-Bonferroni correction applied within each row, final evaluation count.\n\n";
        md << "| |";
        for (auto c : ds) md << " " << to_string(c) << " |";
        md << "\n|---|";
        for (std::size_t i = 0; i < ds.size(); ++i) md << "---|";
        md << "\n";
        for (auto row : ds) {
            std::vector<double> finals;
            std::vector<DescriptorKind> cols;
            for (auto col : ds) {
                if (col == row) continue;
                cols.push_back(col);
                finals.push_back(pairwise_p(row, col, max_e));
            }
            const auto holm = holm_bonferroni(finals);
            std::map<DescriptorKind, double> holm_by_col;
            for (std::size_t i = 0; i < cols.size(); ++i) holm_by_col[cols[i]] = holm[i];
            for (std::size_t e = 1; e <= max_e; ++e) {
                for (std::size_t i = 0; i < cols.size(); ++i) {
                    const double p = e == max_e ? finals[i] : pairwise_p(row, cols[i], e);
                    pw << e << "," << to_string(row) << "," << to_string(cols[i]) << "," << p
                       << "," << (e == max_e ? std::to_string(holm[i]) : "") << "\n";
                }
            }
            md << "| " << to_string(row) << " |";
            for (auto col : ds) {
                if (col == row)
                    md << " |";
                else
                    md << " " << holm_by_col[col] << " |";
            }
            md << "\n";
        }
        std::ofstream mdf(fs::path(out_dir) / "pairwise_table.md");
        mdf << md.str();
    }

    // (d) optimised vs default.
    {
        std::ofstream ovd(fs::path(out_dir) / "optimized_vs_default.csv");
        ovd << "descriptor,evaluations,weighted_mean_optimized,weighted_mean_default,"
               "p_optimized_better\n";
        for (auto d : descriptors) {
            const double def =
                wmean([&](const ProblemCurves& p) { return p.default_test.at(d); });
            for (std::size_t e = 1; e <= max_e; ++e) {
                const double opt =
                    wmean([&](const ProblemCurves& p) { return p.test.at(d)[e - 1]; });
                std::vector<PairedSample> sample(problems.size());
                for (std::size_t i = 0; i < problems.size(); ++i) {
                    sample[i].difference =
                        problems[i].test.at(d)[e - 1] - problems[i].default_test.at(d);
                    sample[i].cluster_id = problems[i].dataset_id;
                }
                const double p = clustered_wilcoxon(sample, Alternative::Greater);
                ovd << to_string(d) << "," << e << "," << opt << "," << def << "," << p << "\n";
            }
        }
    }

    // (e) weighted Kendall tau matrix of final test AUROC.
    {
        std::ofstream kt(fs::path(out_dir) / "kendall_tau.csv");
        kt << "descriptor_a,descriptor_b,weighted_tau\n";
        std::vector<DescriptorKind> ds(descriptors.begin(), descriptors.end());
        for (std::size_t a = 0; a < ds.size(); ++a) {
            for (std::size_t b = a + 1; b < ds.size(); ++b) {
                std::vector<double> va(problems.size()), vb(problems.size());
                for (std::size_t i = 0; i < problems.size(); ++i) {
                    va[i] = problems[i].test.at(ds[a])[max_e - 1];
                    vb[i] = problems[i].test.at(ds[b])[max_e - 1];
                }
                const auto tau = weighted_kendall_tau(va, vb, weights);
                kt << to_string(ds[a]) << "," << to_string(ds[b]) << ","
                   << (tau ? std::to_string(*tau) : "undefined") << "\n";
            }
        }
    }

    // (f) ALP/SVM validation-selected combination, both selector variants.
    if (descriptors.count(DescriptorKind::ALP) && descriptors.count(DescriptorKind::SVM)) {
        std::ofstream comb(fs::path(out_dir) / "alp_svm_combination.csv");
        comb << "selector,weighted_mean_combination_test,weighted_mean_alp_test,"
                "weighted_mean_svm_test,p_combination_better_than_alp,"
                "p_combination_better_than_svm,fraction_selector_worse_on_test\n";
        for (const std::string selector : {"mean-across-folds", "per-fold"}) {
            std::vector<double> comb_test(problems.size());
            double worse_w = 0.0, total_w = 0.0;
            for (std::size_t i = 0; i < problems.size(); ++i) {
                const auto& p = problems[i];
                if (selector == "mean-across-folds") {
                    const bool pick_alp = p.validation.at(DescriptorKind::ALP)[max_e - 1] >=
                                          p.validation.at(DescriptorKind::SVM)[max_e - 1];
                    const auto chosen = pick_alp ? DescriptorKind::ALP : DescriptorKind::SVM;
                    const auto other = pick_alp ? DescriptorKind::SVM : DescriptorKind::ALP;
                    comb_test[i] = p.test.at(chosen)[max_e - 1];
                    total_w += weights[i].weight;
                    if (p.test.at(chosen)[max_e - 1] < p.test.at(other)[max_e - 1])
                        worse_w += weights[i].weight;
                } else {
                    const auto& va = p.fold_final_val.at(DescriptorKind::ALP);
                    const auto& vs = p.fold_final_val.at(DescriptorKind::SVM);
                    const auto& ta = p.fold_final_test.at(DescriptorKind::ALP);
                    const auto& ts = p.fold_final_test.at(DescriptorKind::SVM);
                    double sum = 0.0;
                    for (std::size_t f = 0; f < va.size(); ++f) {
                        const bool pick_alp = va[f] >= vs[f];
                        sum += pick_alp ? ta[f] : ts[f];
                        total_w += weights[i].weight / static_cast<double>(va.size());
                        if ((pick_alp ? ta[f] : ts[f]) < (pick_alp ? ts[f] : ta[f]))
                            worse_w += weights[i].weight / static_cast<double>(va.size());
                    }
                    comb_test[i] = sum / static_cast<double>(va.size());
                }
            }
            auto p_vs = [&](DescriptorKind d) {
                std::vector<PairedSample> sample(problems.size());
                for (std::size_t i = 0; i < problems.size(); ++i) {
                    sample[i].difference = comb_test[i] - problems[i].test.at(d)[max_e - 1];
                    sample[i].cluster_id = problems[i].dataset_id;
                }
                return clustered_wilcoxon(sample, Alternative::Greater);
            };
            comb << selector << "," << weighted_mean(comb_test, weights) << ","
                 << wmean([&](const ProblemCurves& p) {
                        return p.test.at(DescriptorKind::ALP)[max_e - 1];
                    })
                 << ","
                 << wmean([&](const ProblemCurves& p) {
                        return p.test.at(DescriptorKind::SVM)[max_e - 1];
                    })
                 << "," << p_vs(DescriptorKind::ALP) << "," << p_vs(DescriptorKind::SVM) << ","
                 << (total_w > 0 ? worse_w / total_w : 0.0) << "\n";
        }
    }

    // Machine-readable summary of the headline numbers.
    {
        nlohmann::json j;
        j["evaluation_counts"] = max_e;
        j["n_problems"] = problems.size();
        for (auto d : descriptors) {
            nlohmann::json jd;
            jd["final_weighted_test_auroc"] =
                wmean([&](const ProblemCurves& p) { return p.test.at(d)[max_e - 1]; });
            jd["default_weighted_test_auroc"] =
                wmean([&](const ProblemCurves& p) { return p.default_test.at(d); });
            j["descriptors"][to_string(d)] = jd;
        }
        std::ofstream f(fs::path(out_dir) / "report.json");
        f << j.dump(2) << "\n";
    }
}

void report_runtime(const std::vector<ExperimentRecord>& records, const std::string& out_path) {
    std::ofstream out(out_path);
    out << "descriptor,evaluations,mean_cumulative_seconds\n";
    if (records.empty()) return;
    std::map<DescriptorKind, std::vector<const ExperimentRecord*>> by_desc;
    std::size_t max_e = 0;
    for (const auto& r : records) {
        if (r.eval_seconds.empty()) continue;
        by_desc[r.descriptor].push_back(&r);
        max_e = std::max(max_e, r.eval_seconds.size());
    }
    for (const auto& [desc, recs] : by_desc) {
        for (std::size_t e = 1; e <= max_e; ++e) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto* r : recs) {
                if (r->eval_seconds.size() < e) continue;
                double cum = 0.0;
                for (std::size_t i = 0; i < e; ++i) cum += r->eval_seconds[i];
                sum += cum;
                ++n;
            }
            if (n > 0)
                out << to_string(desc) << "," << e << "," << (sum / static_cast<double>(n)) << "\n";
        }
    }
}

}  // namespace occ
