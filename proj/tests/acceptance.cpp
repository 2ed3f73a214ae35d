// End-to-end acceptance suite. Each numbered check prints one PASS/FAIL line;
// the process exits non-zero if any check fails. The single argument is the
// directory of benchmark CSV datasets.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "occ/harness.hpp"
#include "occ/optimizers.hpp"
#include "occ/svm.hpp"
#include "occ/validation.hpp"
#include "oracles.hpp"

using namespace occ;
namespace fs = std::filesystem;

namespace {

struct Failure {
    std::string what;
};

int g_failures = 0;

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure{what};
}

void run_criterion(int number, const std::string& title, const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string verdict = "PASS";
    std::string detail;
    try {
        body();
    } catch (const Failure& f) {
        verdict = "FAIL";
        detail = f.what;
        ++g_failures;
    } catch (const std::exception& e) {
        verdict = "FAIL";
        detail = std::string("exception: ") + e.what();
        ++g_failures;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d [%s] %s (%.1fs)%s%s\n", number, verdict.c_str(), title.c_str(),
                secs, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1

void check_loo_equivalence() {
    std::mt19937_64 rng(0x100);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 5 + rng() % 21;     // 5..25 targets
        const std::size_t o = 1 + rng() % 25;     // 1..25 negatives
        const std::size_t d = 1 + rng() % 4;      // 1..4 features
        const auto p = oracle::random_problem(rng, n, o, d);

        for (std::size_t k = 1; k <= n - 1; ++k) {
            const double naive = oracle::naive_loo(
                p, [&](const Matrix& m, std::span<const double> y) { return oracle::nnd(m, y, k); });
            const double fast = loo_validate_nnd(p, k);
            require(std::fabs(fast - naive) <= 1e-12,
                    "nnd loo trial " + std::to_string(trial) + " k=" + std::to_string(k) + ": " +
                        fmt(fast) + " vs " + fmt(naive));
        }
        for (std::size_t k = 1; k + 2 <= n; ++k) {
            const double naive = oracle::naive_loo(
                p, [&](const Matrix& m, std::span<const double> y) { return oracle::lnnd(m, y, k); });
            const double fast = loo_validate_lnnd(p, k);
            require(std::fabs(fast - naive) <= 1e-12,
                    "lnnd loo trial " + std::to_string(trial) + " k=" + std::to_string(k) + ": " +
                        fmt(fast) + " vs " + fmt(naive));
        }
        for (std::size_t k = 1; k <= 4; ++k)
            for (std::size_t l = 1; l <= 4; ++l) {
                const double naive = oracle::naive_loo(
                    p, [&](const Matrix& m, std::span<const double> y) {
                        return oracle::alp(m, y, k, l);
                    });
                const double fast = loo_validate_alp(p, k, l);
                require(std::fabs(fast - naive) <= 1e-12,
                        "alp loo trial " + std::to_string(trial) + " k=" + std::to_string(k) +
                            " l=" + std::to_string(l) + ": " + fmt(fast) + " vs " + fmt(naive));
            }
    }
}

// ---------------------------------------------------------------- criterion 2

void check_auroc_oracle() {
    require(auroc({0.9, 0.8}, {0.1, 0.2}) == 1.0, "perfect separation != 1.0");
    require(auroc({0.3, 0.3}, {0.3, 0.3, 0.3}) == 0.5, "all ties != 0.5");
    std::mt19937_64 rng(0x200);
    std::uniform_int_distribution<int> len(1, 40);
    std::uniform_int_distribution<int> val(0, 12);
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> ts(len(rng)), os(len(rng));
        for (double& v : ts) v = val(rng) / 4.0;
        for (double& v : os) v = val(rng) / 4.0;
        const double a = auroc(ts, os);
        const double b = oracle::auroc_pairs(ts, os);
        require(a == b, "set " + std::to_string(t) + ": " + fmt(a) + " vs " + fmt(b));
    }
}

// ---------------------------------------------------------------- criterion 3

void check_alp() {
    std::mt19937_64 rng(0x300);
    std::normal_distribution<double> g;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 4 + rng() % 25;
        const std::size_t d = 1 + rng() % 4;
        Matrix target(n, d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) target(i, j) = g(rng);
        const std::size_t k = 1 + rng() % (5 * n);
        const std::size_t l = 1 + rng() % (5 * n);

        const auto wk = linear_weights(k, alp_truncation(n));
        double sum = 0.0;
        for (double w : wk) sum += w;
        require(std::fabs(sum - 1.0) <= 1e-12, "weights sum " + fmt(sum));

        const auto model = fit_descriptor(DescriptorKind::ALP, target, {.k = k, .l = l});
        for (int q = 0; q < 5; ++q) {
            std::vector<double> y(d);
            for (double& v : y) v = 1.5 * g(rng);
            const double got = model->score(y);
            const double want = oracle::alp(target, y, k, l);
            require(std::fabs(got - want) <= 1e-12,
                    "instance " + std::to_string(t) + ": " + fmt(got) + " vs " + fmt(want));
            require(got >= 0.0 && got <= 1.0, "score out of [0,1]: " + fmt(got));
        }
    }
}

// ---------------------------------------------------------------- criterion 4

void check_lof_lnnd() {
    std::mt19937_64 rng(0x400);
    std::normal_distribution<double> g;
    for (int t = 0; t < 60; ++t) {
        const std::size_t n = 5 + rng() % 16;
        const std::size_t d = 1 + rng() % 3;
        Matrix target(n, d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) target(i, j) = g(rng);
        const std::size_t k = 1 + rng() % (n - 1);
        const auto lof_model = fit_descriptor(DescriptorKind::LOF, target, {.k = k});
        const auto lnnd_model = fit_descriptor(DescriptorKind::LNND, target, {.k = k});
        for (int q = 0; q < 5; ++q) {
            std::vector<double> y(d);
            for (double& v : y) v = 1.5 * g(rng);
            const double lof_got = lof_model->score(y);
            const double lof_want = oracle::lof(target, y, k);
            require(std::fabs(lof_got - lof_want) <= 1e-9,
                    "lof " + std::to_string(t) + ": " + fmt(lof_got) + " vs " + fmt(lof_want));
            const double ln_got = lnnd_model->score(y);
            const double ln_want = oracle::lnnd(target, y, k);
            require(std::fabs(ln_got - ln_want) <= 1e-9,
                    "lnnd " + std::to_string(t) + ": " + fmt(ln_got) + " vs " + fmt(ln_want));
        }
    }

    // interior point of a uniform 1-D grid
    Matrix grid;
    for (int i = 0; i <= 12; ++i)
        if (i != 6) grid.push_row(std::vector<double>{static_cast<double>(i)});
    const auto model = fit_descriptor(DescriptorKind::LOF, grid, {.k = 2});
    const double got = model->score(std::vector<double>{6.0});
    const double want = oracle::lof(grid, std::vector<double>{6.0}, 2);
    require(std::fabs(got - want) <= 1e-6, "grid lof " + fmt(got) + " vs " + fmt(want));
}

// ---------------------------------------------------------------- criterion 5

void check_svm() {
    std::mt19937_64 rng(0x500);
    std::normal_distribution<double> g;
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 5 + rng() % 36;  // 5..40
        const std::size_t d = 1 + rng() % 3;
        Matrix target(n, d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) target(i, j) = g(rng);
        std::uniform_real_distribution<double> unu(0.1, 0.95), uc(0.3, 3.0);
        const double nu = unu(rng);
        const double c = uc(rng);

        // default tolerance: KKT residual within 1e-3
        const auto sol = solve_one_class_svm(target, nu, c);
        require(sol.kkt_violation <= 1e-3, "kkt " + fmt(sol.kkt_violation));

        // tightly solved objective against the independent oracle
        const auto tight = solve_one_class_svm(target, nu, c, 1e-7);
        std::vector<double> kernel(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                kernel[i * n + j] = gaussian_kernel(target.row(i), target.row(j), c);
        const double want =
            oracle::projected_gradient_dual(kernel, n, 1.0 / (nu * static_cast<double>(n)));
        require(std::fabs(tight.objective - want) <= 1e-4,
                "objective " + fmt(tight.objective) + " vs " + fmt(want));

        // nu bounds the margin-error and support-vector fractions
        std::size_t errors = 0, svs = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (svm_decision(target, sol, target.row(i)) < -1e-3) ++errors;
            if (sol.alpha[i] > 1e-8) ++svs;
        }
        const double nn = static_cast<double>(n);
        require(static_cast<double>(errors) / nn <= nu + 1.0 / nn,
                "margin errors " + std::to_string(errors) + "/" + std::to_string(n) +
                    " for nu=" + fmt(nu));
        require(static_cast<double>(svs) / nn >= nu - 1.0 / nn,
                "support vectors " + std::to_string(svs) + "/" + std::to_string(n) +
                    " for nu=" + fmt(nu));
    }
}

// ------------------------------------------------------- criteria 6 and 7

std::vector<SearchResult> g_logged_searches;

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

void check_optimizers() {
    struct TestFn {
        std::string name;
        std::size_t dims;
        std::function<double(const std::vector<double>&)> f;
        double optimum;
        bool multimodal_1d;
    };
    const auto branin = [](const std::vector<double>& x) {
        const double a = 15.0 * x[0] - 5.0;
        const double b = 15.0 * x[1];
        const double r = b - 5.1 / (4.0 * M_PI * M_PI) * a * a + 5.0 / M_PI * a - 6.0;
        return -(r * r + 10.0 * (1.0 - 1.0 / (8.0 * M_PI)) * std::cos(a) + 10.0) / 55.0;
    };
    std::vector<TestFn> fns;
    fns.push_back({"quadratic-1d", 1,
                   [](const std::vector<double>& x) {
                       const double d = x[0] - 0.3;
                       return -d * d;
                   },
                   0.0, false});
    fns.push_back({"two-bump-1d", 1,
                   [](const std::vector<double>& x) {
                       const double a = x[0] - 0.8, b = x[0] - 0.2;
                       return 0.992 * std::exp(-30.0 * a * a) + std::exp(-50.0 * b * b);
                   },
                   1.0, true});
    fns.push_back({"quadratic-2d", 2,
                   [](const std::vector<double>& x) {
                       const double a = x[0] - 0.3, b = x[1] - 0.6;
                       return -(a * a + b * b);
                   },
                   0.0, false});
    fns.push_back({"branin-2d", 2, branin, -0.397887 / 55.0, false});

    const std::vector<OptimizerKind> kinds = {OptimizerKind::Random, OptimizerKind::HookeJeeves,
                                              OptimizerKind::NelderMead, OptimizerKind::Tpe,
                                              OptimizerKind::MalherbePowell};
    for (const auto& fn : fns) {
        std::map<OptimizerKind, std::vector<double>> finals;
        for (std::size_t seed = 0; seed < 20; ++seed) {
            Budget budget;
            budget.seed = 0x600 + 97 * seed;
            const std::vector<double> start(fn.dims, 0.5);
            for (auto kind : kinds) {
                SearchResult r;
                const auto raw = make_function_objective(fn.f);
                switch (kind) {
                    case OptimizerKind::Random: r = random_search(raw, fn.dims, budget); break;
                    case OptimizerKind::HookeJeeves:
                        r = hooke_jeeves(raw, fn.dims, budget, start);
                        break;
                    case OptimizerKind::NelderMead:
                        r = nelder_mead(raw, fn.dims, budget, start);
                        break;
                    case OptimizerKind::Tpe: r = tpe(raw, fn.dims, budget); break;
                    case OptimizerKind::MalherbePowell:
                        r = malherbe_powell(raw, fn.dims, budget);
                        break;
                }
                finals[kind].push_back(r.best.value);
                g_logged_searches.push_back(std::move(r));
            }
        }
        const double random_median = median_of(finals[OptimizerKind::Random]);
        for (auto kind : kinds) {
            const double m = median_of(finals[kind]);
            require(m >= random_median - 0.01, fn.name + ": " + to_string(kind) + " median " +
                                                   fmt(m) + " below random " + fmt(random_median));
        }
        if (fn.multimodal_1d) {
            const double mp_regret =
                fn.optimum - median_of(finals[OptimizerKind::MalherbePowell]);
            for (auto local : {OptimizerKind::HookeJeeves, OptimizerKind::NelderMead}) {
                const double local_regret = fn.optimum - median_of(finals[local]);
                require(mp_regret <= local_regret,
                        fn.name + ": global-local regret " + fmt(mp_regret) + " above " +
                            to_string(local) + " regret " + fmt(local_regret));
            }
        }
    }
}

void check_budget_contract(const std::string& data_dir) {
    require(!g_logged_searches.empty(), "no logged searches");
    auto check_result = [&](const SearchResult& r, const std::string& tag) {
        std::size_t evals = 0;
        // synthetic objectives cache by exact coordinates; validation-backed
        // ones by the discretised parameter set -- accept a match on either
        std::map<std::vector<double>, double> seen_coords;
        std::map<std::string, double> seen_params;
        double best = -std::numeric_limits<double>::infinity();
        std::size_t e = 0;
        for (const auto& t : r.history) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%zu|%zu|%a|%a", t.params.k, t.params.l, t.params.nu,
                          t.params.c_prime);
            const std::string pkey = buf;
            if (t.cache_hit) {
                require(!t.eval_index.has_value(), tag + ": cache hit counted as evaluation");
                if (auto it = seen_coords.find(t.coords); it != seen_coords.end()) {
                    require(it->second == t.value, tag + ": cache hit value mismatch");
                } else {
                    auto pit = seen_params.find(pkey);
                    require(pit != seen_params.end() && pit->second == t.value,
                            tag + ": cache hit value mismatch");
                }
            } else {
                ++evals;
                seen_coords.emplace(t.coords, t.value);
                seen_params.emplace(pkey, t.value);
                best = std::max(best, t.value);
                require(e < r.incumbent_by_eval.size() && r.incumbent_by_eval[e].value == best,
                        tag + ": incumbent not monotone-consistent");
                ++e;
            }
        }
        require(evals <= 50, tag + ": " + std::to_string(evals) + " evaluations");
        require(r.history.size() <= 100, tag + ": " + std::to_string(r.history.size()) +
                                             " proposals");
    };
    for (std::size_t i = 0; i < g_logged_searches.size(); ++i)
        check_result(g_logged_searches[i], "synthetic search " + std::to_string(i));

    // Validation-backed searches on a real problem, every optimiser.
    std::vector<fs::path> csvs;
    for (const auto& e : fs::directory_iterator(data_dir))
        if (e.path().extension() == ".csv") csvs.push_back(e.path());
    std::sort(csvs.begin(), csvs.end());
    require(!csvs.empty(), "no datasets in " + data_dir);
    const Dataset ds = load_csv(csvs.front().string(), "class");
    const auto parts = derive_problems(ds, 10);
    require(!parts.empty(), "no problems derived");
    std::vector<bool> is_target(ds.features.rows(), false);
    for (auto r : parts[0].target_rows) is_target[r] = true;
    const auto folds = stratified_kfold(is_target, 5, 1);
    const OneClassProblem problem = make_problem(ds, parts[0], folds[0]);
    for (auto desc : {DescriptorKind::NND, DescriptorKind::ALP}) {
        for (auto kind : {OptimizerKind::Random, OptimizerKind::HookeJeeves,
                          OptimizerKind::NelderMead, OptimizerKind::Tpe,
                          OptimizerKind::MalherbePowell}) {
            ObjectiveHandle handle(problem, desc, 0x700);
            Budget budget;
            budget.seed = 0x701;
            const auto start =
                handle.domain().encode(default_params(desc, problem.target_train.rows()));
            const auto r = run_search(kind, handle, budget, start);
            check_result(r, to_string(desc) + "/" + to_string(kind));
            require(handle.evaluations() <= 50 && handle.proposals() <= 100,
                    "handle counters exceeded for " + to_string(kind));
        }
    }
}

// ---------------------------------------------------- criteria 8 and 10

std::vector<ExperimentRecord> g_benchmark_records;

void check_optimized_vs_default(const std::string& data_dir) {
    const fs::path out = fs::temp_directory_path() / "occ_acceptance_benchmark";
    fs::remove_all(out);

    ExperimentConfig cfg;
    cfg.data_dir = data_dir;
    cfg.out_dir = out.string();
    cfg.optimizers = {OptimizerKind::MalherbePowell};
    cfg.seed = 20260826;
    cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
    cfg.finalise();

    const auto summary = run_experiment(cfg);
    std::string joined;
    for (const auto& f : summary.failures) joined += f + "; ";
    require(summary.failures.empty(), "unit failures: " + joined);

    const auto records = load_records(out.string());
    g_benchmark_records = records;

    std::set<std::string> datasets, problems;
    for (const auto& r : records) {
        datasets.insert(r.dataset_id);
        problems.insert(r.problem_id);
        require(r.evaluations <= 50 && r.proposals <= 100, r.key() + ": budget exceeded");
        for (std::size_t e = 1; e < r.validation_auroc.size(); ++e)
            require(r.validation_auroc[e] >= r.validation_auroc[e - 1],
                    r.key() + ": validation curve not monotone");
    }
    require(datasets.size() >= 8, "only " + std::to_string(datasets.size()) + " datasets");
    require(problems.size() >= 25, "only " + std::to_string(problems.size()) + " problems");

    // weighted mean final test AUROC (mean over folds per problem) per
    // descriptor, optimised vs default values
    for (auto desc : {DescriptorKind::NND, DescriptorKind::LNND, DescriptorKind::LOF,
                      DescriptorKind::ALP, DescriptorKind::SVM}) {
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_problem;
        std::map<std::string, std::string> dataset_of;
        for (const auto& r : records) {
            if (r.descriptor != desc) continue;
            by_problem[r.problem_id].first.push_back(r.test_auroc.back());
            by_problem[r.problem_id].second.push_back(r.default_test_auroc);
            dataset_of[r.problem_id] = r.dataset_id;
        }
        std::vector<std::string> pids, dids;
        std::vector<double> opt, def;
        for (const auto& [pid, curves] : by_problem) {
            pids.push_back(pid);
            dids.push_back(dataset_of[pid]);
            double so = 0.0, sd = 0.0;
            for (double v : curves.first) so += v;
            for (double v : curves.second) sd += v;
            opt.push_back(so / static_cast<double>(curves.first.size()));
            def.push_back(sd / static_cast<double>(curves.second.size()));
        }
        const auto weights = dataset_equal_weights(pids, dids);
        const double wopt = weighted_mean(opt, weights);
        const double wdef = weighted_mean(def, weights);
        require(wopt >= wdef - 0.005, to_string(desc) + ": optimised " + fmt(wopt) +
                                          " vs default " + fmt(wdef));
        if (desc == DescriptorKind::ALP || desc == DescriptorKind::NND)
            require(wopt > wdef, to_string(desc) + ": optimised " + fmt(wopt) +
                                     " not above default " + fmt(wdef));
    }
}

// ---------------------------------------------------------------- criterion 9

void check_statistics() {
    std::mt19937_64 rng(0x900);
    std::normal_distribution<double> g(0.2, 1.0);
    std::uniform_int_distribution<int> coarse(-4, 4);
    for (int t = 0; t < 100; ++t) {
        std::vector<PairedSample> sample;
        std::vector<double> diffs;
        const std::size_t n = 4 + rng() % 25;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = (t % 2) ? g(rng) : coarse(rng) / 3.0;
            diffs.push_back(d);
            sample.push_back({d, "s" + std::to_string(i)});
        }
        const double got = clustered_wilcoxon(sample, Alternative::Greater);
        const double want = oracle::wilcoxon_normal_p_greater(diffs);
        require(std::fabs(got - want) <= 1e-6,
                "singleton sample " + std::to_string(t) + ": " + fmt(got) + " vs " + fmt(want));
    }

    // cluster-level sign-flip permutation comparison on constructed 3-cluster
    // samples; the 8 flip patterns are enumerated exactly
    const std::vector<std::vector<std::pair<double, std::string>>> constructed = {
        {{0.3, "a"}, {-0.1, "a"}, {0.4, "b"}, {-0.2, "b"},
         {0.5, "c"}, {0.6, "c"}, {0.7, "c"}, {0.8, "c"}},
        {{0.2, "a"}, {-0.1, "a"}, {0.4, "b"}, {-0.3, "b"},
         {0.5, "c"}, {0.6, "c"}, {0.7, "c"}, {0.8, "c"}},
    };
    for (std::size_t rep = 0; rep < constructed.size(); ++rep) {
        std::vector<PairedSample> sample;
        for (const auto& [d, c] : constructed[rep]) sample.push_back({d, c});

        std::vector<double> rank(sample.size(), 0.0);
        {
            std::vector<std::pair<double, std::size_t>> mag;
            for (std::size_t i = 0; i < sample.size(); ++i)
                mag.push_back({std::fabs(sample[i].difference), i});
            std::sort(mag.begin(), mag.end());
            for (std::size_t i = 0; i < mag.size(); ++i)
                rank[mag[i].second] = static_cast<double>(i + 1);
        }
        const std::vector<std::string> clusters{"a", "b", "c"};
        auto stat = [&](int mask) {
            double total = 0.0;
            for (std::size_t c = 0; c < clusters.size(); ++c) {
                double s = 0.0;
                for (std::size_t k = 0; k < sample.size(); ++k)
                    if (sample[k].cluster_id == clusters[c])
                        s += (sample[k].difference > 0.0 ? 1.0 : -1.0) * rank[k];
                total += (mask >> c & 1) ? -s : s;
            }
            return total;
        };
        const double observed = stat(0);
        int at_least = 0;
        for (int mask = 0; mask < 8; ++mask)
            if (stat(mask) >= observed) ++at_least;
        const double perm_p = at_least / 8.0;
        const double got = clustered_wilcoxon(sample, Alternative::Greater);
        require(std::fabs(got - perm_p) <= 0.02,
                "3-cluster sample " + std::to_string(rep) + ": " + fmt(got) +
                    " vs permutation " + fmt(perm_p));
    }

    // step-down correction against a from-the-definition oracle
    std::uniform_real_distribution<double> up(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const std::size_t m = 1 + rng() % 8;
        std::vector<double> p(m);
        for (double& v : p) v = up(rng);
        const auto got = holm_bonferroni(p);
        // oracle: sort ascending, running max of min(1, (m-i)*p_(i)), un-sort
        std::vector<std::size_t> order(m);
        for (std::size_t i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
        std::vector<double> want(m);
        double running = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            running = std::max(running,
                               std::min(1.0, static_cast<double>(m - i) * p[order[i]]));
            want[order[i]] = running;
        }
        for (std::size_t i = 0; i < m; ++i)
            require(got[i] == want[i], "holm sample " + std::to_string(t));
    }
}

// --------------------------------------------------------------- criterion 10

std::map<std::string, std::string> stripped_dir_contents(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream f(e.path());
        std::stringstream ss;
        ss << f.rdbuf();
        std::string text = ss.str();
        const auto start = text.find("\"eval_seconds\"");
        if (start != std::string::npos) {
            const auto close = text.find(']', text.find('[', start));
            text = text.substr(0, start) + text.substr(close + 1);
        }
        out[e.path().filename().string()] = text;
    }
    return out;
}

void check_determinism(const std::string& data_dir) {
    const fs::path base = fs::temp_directory_path() / "occ_acceptance_determinism";
    fs::remove_all(base);
    const fs::path data = base / "data";
    fs::create_directories(data);
    fs::copy_file(fs::path(data_dir) / "blobs_close.csv", data / "blobs_close.csv");

    ExperimentConfig cfg;
    cfg.data_dir = data.string();
    cfg.budget_evaluations = 6;
    cfg.budget_proposals = 12;
    cfg.seed = 31337;
    cfg.finalise();

    cfg.out_dir = (base / "a").string();
    cfg.jobs = 1;
    const auto s1 = run_experiment(cfg);
    require(s1.failures.empty(), "first run had failures");
    require(s1.completed > 0, "first run produced nothing");

    cfg.out_dir = (base / "b").string();
    cfg.jobs = 4;
    run_experiment(cfg);
    require(stripped_dir_contents(base / "a") == stripped_dir_contents(base / "b"),
            "parallel rerun differs from sequential run");

    // delete a third of the outputs, rerun, expect exactly the gap refilled
    std::size_t removed = 0, index = 0;
    for (const auto& e : fs::directory_iterator(base / "a")) {
        if (index++ % 3 == 0) {
            fs::remove(e.path());
            ++removed;
        }
    }
    cfg.out_dir = (base / "a").string();
    const auto s3 = run_experiment(cfg);
    require(s3.completed == removed,
            "resume completed " + std::to_string(s3.completed) + " of " +
                std::to_string(removed));
    require(stripped_dir_contents(base / "a") == stripped_dir_contents(base / "b"),
            "resumed output differs");
    fs::remove_all(base);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <data-dir>\n";
        return 2;
    }
    const std::string data_dir = argv[1];

    run_criterion(1, "leave-one-out fast paths equal naive refits (1e-12)", check_loo_equivalence);
    run_criterion(2, "rank-based AUROC equals pair counting exactly", check_auroc_oracle);
    run_criterion(3, "average localised proximity matches direct formulas (1e-12)", check_alp);
    run_criterion(4, "LOF and localised NND match textbook formulas (1e-9)", check_lof_lnnd);
    run_criterion(5, "SVM dual solver: objective, KKT and nu bounds", check_svm);
    run_criterion(6, "optimiser quality on synthetic objectives", check_optimizers);
    run_criterion(7, "budget, cache and incumbent contracts on logged searches",
                  [&] { check_budget_contract(data_dir); });
    run_criterion(8, "optimised values beat defaults on the benchmark corpus",
                  [&] { check_optimized_vs_default(data_dir); });
    run_criterion(9, "statistics match independent oracles", check_statistics);
    run_criterion(10, "pipeline determinism and resume", [&] { check_determinism(data_dir); });

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
