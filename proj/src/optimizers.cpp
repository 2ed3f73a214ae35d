#include "occ/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "json.hpp"
#include "occ/rng.hpp"

namespace occ {

std::string to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::Random: return "random";
        case OptimizerKind::HookeJeeves: return "hooke-jeeves";
        case OptimizerKind::NelderMead: return "nelder-mead";
        case OptimizerKind::Tpe: return "tpe";
        case OptimizerKind::MalherbePowell: return "malherbe-powell";
    }
    throw std::logic_error("to_string: bad OptimizerKind");
}

OptimizerKind optimizer_from_string(const std::string& name) {
    if (name == "random") return OptimizerKind::Random;
    if (name == "hooke-jeeves" || name == "hj") return OptimizerKind::HookeJeeves;
    if (name == "nelder-mead" || name == "nm") return OptimizerKind::NelderMead;
    if (name == "tpe") return OptimizerKind::Tpe;
    if (name == "malherbe-powell" || name == "mp") return OptimizerKind::MalherbePowell;
    throw std::invalid_argument("unknown optimizer: " + name);
}

std::optional<Trial> BudgetedObjective::propose(std::vector<double> coords) {
    if (exhausted()) return std::nullopt;
    if (coords.size() != dims_)
        throw std::invalid_argument("BudgetedObjective::propose: wrong dimension");
    EvalOutcome out = fn_(std::move(coords));
    ++proposals_;
    Trial t;
    t.coords = out.coords;
    t.params = out.params;
    t.value = out.value;
    t.cache_hit = out.cache_hit;
    t.proposal_index = proposals_;
    if (!out.cache_hit) {
        ++evaluations_;
        t.eval_index = evaluations_;
    }
    history_.push_back(t);
    return t;
}

BudgetedObjective::RawFn make_function_objective(
    std::function<double(const std::vector<double>&)> f) {
    auto cache = std::make_shared<std::map<std::vector<double>, double>>();
    return [f = std::move(f), cache](std::vector<double> coords) {
        for (double& x : coords) x = std::min(1.0, std::max(0.0, x));
        EvalOutcome out;
        out.coords = coords;
        if (auto it = cache->find(coords); it != cache->end()) {
            out.cache_hit = true;
            out.value = it->second;
        } else {
            out.value = f(coords);
            cache->emplace(coords, out.value);
        }
        return out;
    };
}

SearchResult finish_search(const BudgetedObjective& objective) {
    SearchResult r;
    r.history = objective.history();
    if (r.history.empty()) throw std::runtime_error("finish_search: empty history");
    const Trial* best = nullptr;
    for (const auto& t : r.history) {
        if (!best || t.value > best->value) best = &t;
        if (t.eval_index) {
            Trial inc = best ? *best : t;
            r.incumbent_by_eval.push_back(inc);
        }
    }
    r.best = *best;
    return r;
}

std::string SearchResult::to_jsonl(const std::string& optimizer_id) const {
    std::string out;
    for (const auto& t : history) {
        nlohmann::json j{{"optimizer", optimizer_id},
                         {"proposal", t.proposal_index},
                         {"coords", t.coords},
                         {"cache_hit", t.cache_hit},
                         {"value", t.value}};
        if (t.eval_index) j["evaluation"] = *t.eval_index;
        out += j.dump();
        out += '\n';
    }
    nlohmann::json summary{{"optimizer", optimizer_id},
                           {"summary", true},
                           {"best_value", best.value},
                           {"best_coords", best.coords},
                           {"proposals", history.size()},
                           {"evaluations", incumbent_by_eval.size()}};
    out += summary.dump();
    out += '\n';
    return out;
}

namespace {

std::vector<double> uniform_point(std::mt19937_64& rng, std::size_t dims) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(dims);
    for (double& v : x) v = u(rng);
    return x;
}

std::vector<double> clamp_box(std::vector<double> x) {
    for (double& v : x) v = std::min(1.0, std::max(0.0, v));
    return x;
}

}  // namespace

void run_random_search(BudgetedObjective& objective) {
    auto rng = make_rng(objective.budget().seed);
    while (!objective.exhausted())
        if (!objective.propose(uniform_point(rng, objective.dims()))) break;
}

void run_hooke_jeeves(BudgetedObjective& objective, std::vector<double> start,
                      double initial_step) {
    constexpr double kStepFloor = 1e-6;
    const std::size_t m = objective.dims();
    start = clamp_box(std::move(start));

    auto base = objective.propose(start);
    if (!base) return;
    double step = initial_step;

    // Exploratory sweep: per axis, try +step then -step, keeping improvements.
    auto explore = [&](std::vector<double> x, double fx) -> std::optional<Trial> {
        Trial cur;
        cur.coords = std::move(x);
        cur.value = fx;
        for (std::size_t d = 0; d < m; ++d) {
            for (double sign : {+1.0, -1.0}) {
                auto cand = cur.coords;
                cand[d] += sign * step;
                auto t = objective.propose(clamp_box(cand));
                if (!t) return std::nullopt;
                if (t->value > cur.value) {
                    cur = *t;
                    break;
                }
            }
        }
        return cur;
    };

    while (step >= kStepFloor && !objective.exhausted()) {
        auto moved = explore(base->coords, base->value);
        if (!moved) return;
        if (moved->value > base->value) {
            // Pattern moves while they keep improving.
            while (!objective.exhausted()) {
                std::vector<double> pattern(m);
                for (std::size_t d = 0; d < m; ++d)
                    pattern[d] = moved->coords[d] + (moved->coords[d] - base->coords[d]);
                base = moved;
                auto around = explore(clamp_box(pattern), -std::numeric_limits<double>::infinity());
                if (!around) return;
                if (around->value > base->value)
                    moved = around;
                else
                    break;
            }
        } else {
            step *= 0.5;
        }
    }
}

void run_nelder_mead(BudgetedObjective& objective, std::vector<double> start,
                     double simplex_scale) {
    constexpr double kDiameterFloor = 1e-6;
    const std::size_t m = objective.dims();
    start = clamp_box(std::move(start));

    std::vector<Trial> simplex;
    {
        auto t = objective.propose(start);
        if (!t) return;
        simplex.push_back(*t);
        for (std::size_t d = 0; d < m; ++d) {
            auto v = start;
            // Offset inward when the outward vertex would clamp onto the start.
            v[d] = v[d] + simplex_scale <= 1.0 ? v[d] + simplex_scale : v[d] - simplex_scale;
            auto vt = objective.propose(clamp_box(v));
            if (!vt) return;
            simplex.push_back(*vt);
        }
    }

    auto diameter = [&]() {
        double dmax = 0.0;
        for (std::size_t a = 0; a < simplex.size(); ++a)
            for (std::size_t b = a + 1; b < simplex.size(); ++b) {
                double d = 0.0;
                for (std::size_t j = 0; j < m; ++j)
                    d = std::max(d, std::abs(simplex[a].coords[j] - simplex[b].coords[j]));
                dmax = std::max(dmax, d);
            }
        return dmax;
    };

    while (!objective.exhausted() && diameter() >= kDiameterFloor) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Trial& a, const Trial& b) { return a.value > b.value; });
        const Trial& best = simplex.front();
        Trial& worst = simplex.back();

        std::vector<double> centroid(m, 0.0);
        for (std::size_t v = 0; v + 1 < simplex.size(); ++v)
            for (std::size_t j = 0; j < m; ++j) centroid[j] += simplex[v].coords[j];
        for (double& c : centroid) c /= static_cast<double>(m);

        auto point_along = [&](double coeff) {
            std::vector<double> x(m);
            for (std::size_t j = 0; j < m; ++j)
                x[j] = centroid[j] + coeff * (centroid[j] - worst.coords[j]);
            return clamp_box(x);
        };

        auto reflected = objective.propose(point_along(1.0));
        if (!reflected) return;

        if (reflected->value > best.value) {
            auto expanded = objective.propose(point_along(2.0));
            if (!expanded) return;
            worst = expanded->value > reflected->value ? *expanded : *reflected;
            continue;
        }
        const double second_worst = simplex[simplex.size() - 2].value;
        if (reflected->value > second_worst) {
            worst = *reflected;
            continue;
        }
        auto contracted = objective.propose(point_along(-0.5));
        if (!contracted) return;
        if (contracted->value > worst.value) {
            worst = *contracted;
            continue;
        }
        // Shrink towards the best vertex.
        for (std::size_t v = 1; v < simplex.size(); ++v) {
            std::vector<double> x(m);
            for (std::size_t j = 0; j < m; ++j)
                x[j] = best.coords[j] + 0.5 * (simplex[v].coords[j] - best.coords[j]);
            auto t = objective.propose(clamp_box(x));
            if (!t) return;
            simplex[v] = *t;
        }
    }
}

namespace {

double truncated_normal_pdf(double x, double mu, double sigma) {
    auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
    auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    const double z_mass = cdf((1.0 - mu) / sigma) - cdf((0.0 - mu) / sigma);
    if (z_mass <= 0.0) return 0.0;
    return phi((x - mu) / sigma) / (sigma * z_mass);
}

// Per-dimension Parzen estimator over [0,1] with adjacency-based bandwidths.
struct ParzenDim {
    std::vector<double> mu;
    std::vector<double> sigma;

    // Kernel order matches the input order so candidates can be sampled
    // jointly across dimensions (one kernel index shared by all of them).
    explicit ParzenDim(std::vector<double> samples) : mu(std::move(samples)) {
        std::vector<std::size_t> order(mu.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return mu[a] < mu[b]; });
        sigma.resize(mu.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            // geometric mean of the neighbour gaps: the max-gap rule lets a
            // point beside a distant cluster inherit that whole distance and
            // never refine, while the pure nearest-gap rule collapses too
            // fast to keep exploring
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            if (i > 0) {
                const double g = mu[order[i]] - mu[order[i - 1]];
                lo = std::min(lo, g);
                hi = std::max(hi, g);
            }
            if (i + 1 < order.size()) {
                const double g = mu[order[i + 1]] - mu[order[i]];
                lo = std::min(lo, g);
                hi = std::max(hi, g);
            }
            if (!std::isfinite(lo)) lo = hi = 1.0;
            sigma[order[i]] = std::max(std::sqrt(lo * hi), 1e-3);
        }
    }

    // The mixture carries one uniform prior component alongside the kernels,
    // which regularises the density ratio and keeps some mass everywhere.
    double pdf(double x) const {
        double s = 1.0;  // uniform prior component on [0,1]
        for (std::size_t i = 0; i < mu.size(); ++i)
            s += truncated_normal_pdf(x, mu[i], sigma[i]);
        return s / static_cast<double>(mu.size() + 1);
    }

    // Draws from kernel i (i == mu.size() selects the uniform prior).
    double sample_kernel(std::size_t i, std::mt19937_64& rng) const {
        if (i == mu.size()) {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            return u(rng);
        }
        std::normal_distribution<double> n(mu[i], sigma[i]);
        for (int attempt = 0; attempt < 100; ++attempt) {
            const double x = n(rng);
            if (x >= 0.0 && x <= 1.0) return x;
        }
        return std::min(1.0, std::max(0.0, mu[i]));
    }
};

}  // namespace

void run_tpe(BudgetedObjective& objective, const TpeOptions& options) {
    if (options.gamma <= 0.0 || options.gamma >= 1.0)
        throw std::invalid_argument("run_tpe: gamma out of (0,1)");
    const std::size_t m = objective.dims();
    auto rng = make_rng(objective.budget().seed);

    while (!objective.exhausted()) {
        const auto& hist = objective.history();
        const std::size_t t = hist.size();

        bool degenerate = true;
        for (const auto& tr : hist)
            if (tr.value != hist.front().value) degenerate = false;

        if (t < options.warmup || degenerate) {
            if (!objective.propose(uniform_point(rng, m))) return;
            continue;
        }

        std::vector<std::size_t> order(t);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return hist[a].value > hist[b].value;
        });
        const auto n_good =
            static_cast<std::size_t>(std::ceil(options.gamma * static_cast<double>(t)));

        std::vector<ParzenDim> good, bad;
        for (std::size_t d = 0; d < m; ++d) {
            std::vector<double> gs, bs;
            for (std::size_t r = 0; r < t; ++r)
                (r < n_good ? gs : bs).push_back(hist[order[r]].coords[d]);
            good.emplace_back(std::move(gs));
            bad.emplace_back(std::move(bs));
        }

        std::vector<double> best_cand;
        double best_ratio = -1.0;
        std::uniform_int_distribution<std::size_t> pick(0, n_good);  // n_good = uniform prior
        for (std::size_t c = 0; c < options.n_candidates; ++c) {
            // one kernel index for all dimensions, so candidates perturb an
            // actual good point instead of mixing coordinates across modes
            const std::size_t i = pick(rng);
            std::vector<double> x(m);
            for (std::size_t d = 0; d < m; ++d) x[d] = good[d].sample_kernel(i, rng);
            double num = 1.0, den = 1.0;
            for (std::size_t d = 0; d < m; ++d) {
                num *= good[d].pdf(x[d]);
                den *= bad[d].pdf(x[d]);
            }
            const double ratio = den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
            if (ratio > best_ratio) {
                best_ratio = ratio;
                best_cand = std::move(x);
            }
        }
        if (!objective.propose(std::move(best_cand))) return;
    }
}

double LipschitzState::upper_bound(const std::vector<double>& x,
                                   const std::vector<Trial>& points) const {
    double bound = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        double b = p.value;
        for (std::size_t d = 0; d < slopes.size(); ++d)
            b += slopes[d] * std::abs(x[d] - p.coords[d]);
        bound = std::min(bound, b);
    }
    return bound + epsilon;
}

void LipschitzState::observe(const std::vector<Trial>& prior, const Trial& fresh) {
    for (const auto& p : prior) {
        const double df = std::abs(fresh.value - p.value);
        double weighted = 0.0, total = 0.0;
        for (std::size_t d = 0; d < slopes.size(); ++d) {
            const double dx = std::abs(fresh.coords[d] - p.coords[d]);
            weighted += slopes[d] * dx;
            total += dx;
        }
        if (df <= weighted + epsilon) continue;
        if (weighted > 0.0) {
            const double scale = df / weighted;
            for (double& s : slopes) s *= scale;
        } else if (total > 0.0) {
            for (double& s : slopes) s = std::max(s, df / total);
        }
    }
}

namespace {

struct QuadraticModel {
    Eigen::VectorXd coef;
    std::size_t dims;

    static std::size_t n_terms(std::size_t m) { return (m + 1) * (m + 2) / 2; }

    static Eigen::VectorXd features(const std::vector<double>& x) {
        const std::size_t m = x.size();
        Eigen::VectorXd f(n_terms(m));
        std::size_t idx = 0;
        f(idx++) = 1.0;
        for (std::size_t d = 0; d < m; ++d) f(idx++) = x[d];
        for (std::size_t d = 0; d < m; ++d)
            for (std::size_t e = d; e < m; ++e) f(idx++) = x[d] * x[e];
        return f;
    }

    double predict(const std::vector<double>& x) const { return features(x).dot(coef); }
};

std::optional<QuadraticModel> fit_quadratic(const std::vector<const Trial*>& pts,
                                            std::size_t dims) {
    const std::size_t p = QuadraticModel::n_terms(dims);
    if (pts.size() < p) return std::nullopt;
    Eigen::MatrixXd a(pts.size(), p);
    Eigen::VectorXd y(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        a.row(i) = QuadraticModel::features(pts[i]->coords);
        y(i) = pts[i]->value;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < static_cast<Eigen::Index>(p)) return std::nullopt;
    QuadraticModel model;
    model.dims = dims;
    model.coef = qr.solve(y);
    return model;
}

}  // namespace

void run_malherbe_powell(BudgetedObjective& objective, const MalherbePowellOptions& options) {
    const std::size_t m = objective.dims();
    auto rng = make_rng(objective.budget().seed);
    LipschitzState lip(m);
    lip.epsilon = options.epsilon;
    double trust_radius = options.initial_trust_radius;

    auto submit = [&](std::vector<double> x) -> bool {
        const auto prior = objective.history();  // copy: the fresh trial joins after
        auto t = objective.propose(std::move(x));
        if (!t) return false;
        lip.observe(prior, *t);
        return true;
    };

    if (!submit(uniform_point(rng, m))) return;

    bool global_turn = true;  // strict round robin, global first
    while (!objective.exhausted()) {
        const auto& hist = objective.history();
        const Trial* incumbent = &hist.front();
        for (const auto& t : hist)
            if (t.value > incumbent->value) incumbent = &t;

        if (global_turn) {
            // Evaluate the candidate with the largest potential improvement;
            // fall back to a plain random proposal if nothing can improve.
            std::vector<double> best_cand;
            double best_bound = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < options.global_candidates; ++c) {
                auto x = uniform_point(rng, m);
                const double b = lip.upper_bound(x, hist);
                if (b > best_bound) {
                    best_bound = b;
                    best_cand = std::move(x);
                }
            }
            if (best_bound <= incumbent->value) best_cand = uniform_point(rng, m);
            if (!submit(std::move(best_cand))) return;
        } else {
            // Trust-region step on a least-squares quadratic around the
            // incumbent; skipped when the fit is singular.
            std::vector<const Trial*> pts;
            for (const auto& t : hist) pts.push_back(&t);
            std::sort(pts.begin(), pts.end(), [&](const Trial* a, const Trial* b) {
                double da = 0.0, db = 0.0;
                for (std::size_t d = 0; d < m; ++d) {
                    da += std::abs(a->coords[d] - incumbent->coords[d]);
                    db += std::abs(b->coords[d] - incumbent->coords[d]);
                }
                return da < db;
            });
            const std::size_t want = std::min<std::size_t>(pts.size(),
                                                           2 * QuadraticModel::n_terms(m));
            pts.resize(want);
            const auto model = fit_quadratic(pts, m);
            if (model) {
                std::vector<double> best_x;
                double best_pred = -std::numeric_limits<double>::infinity();
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                for (std::size_t c = 0; c < 200; ++c) {
                    std::vector<double> x(m);
                    for (std::size_t d = 0; d < m; ++d)
                        x[d] = incumbent->coords[d] + trust_radius * u(rng);
                    x = clamp_box(std::move(x));
                    const double pred = model->predict(x);
                    if (pred > best_pred) {
                        best_pred = pred;
                        best_x = std::move(x);
                    }
                }
                const double incumbent_value = incumbent->value;
                const double predicted_gain = best_pred - incumbent_value;
                const auto before = objective.history().size();
                if (!submit(best_x)) return;
                const Trial& fresh = objective.history()[before];
                const double actual_gain = fresh.value - incumbent_value;
                if (predicted_gain > 0.0 && actual_gain >= 0.5 * predicted_gain)
                    trust_radius = std::min(2.0 * trust_radius, 0.5);
                else
                    trust_radius = std::max(0.5 * trust_radius, 1e-4);
            }
        }
        global_turn = !global_turn;
    }
}

namespace {

SearchResult drive(const BudgetedObjective::RawFn& fn, std::size_t dims, const Budget& budget,
                   const std::function<void(BudgetedObjective&)>& algo) {
    BudgetedObjective obj(fn, dims, budget);
    algo(obj);
    return finish_search(obj);
}

}  // namespace

SearchResult random_search(const BudgetedObjective::RawFn& fn, std::size_t dims,
                           const Budget& budget) {
    return drive(fn, dims, budget, [](BudgetedObjective& o) { run_random_search(o); });
}

SearchResult hooke_jeeves(const BudgetedObjective::RawFn& fn, std::size_t dims,
                          const Budget& budget, std::vector<double> start, double initial_step) {
    return drive(fn, dims, budget, [&](BudgetedObjective& o) {
        run_hooke_jeeves(o, start, initial_step);
    });
}

SearchResult nelder_mead(const BudgetedObjective::RawFn& fn, std::size_t dims,
                         const Budget& budget, std::vector<double> start, double simplex_scale) {
    return drive(fn, dims, budget, [&](BudgetedObjective& o) {
        run_nelder_mead(o, start, simplex_scale);
    });
}

SearchResult tpe(const BudgetedObjective::RawFn& fn, std::size_t dims, const Budget& budget,
                 const TpeOptions& options) {
    return drive(fn, dims, budget, [&](BudgetedObjective& o) { run_tpe(o, options); });
}

SearchResult malherbe_powell(const BudgetedObjective::RawFn& fn, std::size_t dims,
                             const Budget& budget, const MalherbePowellOptions& options) {
    return drive(fn, dims, budget, [&](BudgetedObjective& o) { run_malherbe_powell(o, options); });
}

SearchResult run_search(OptimizerKind kind, ObjectiveHandle& handle, const Budget& budget,
                        const std::vector<double>& default_start) {
    auto fn = [&handle](std::vector<double> coords) { return handle.propose(std::move(coords)); };
    const std::size_t dims = handle.domain().dims;
    switch (kind) {
        case OptimizerKind::Random: return random_search(fn, dims, budget);
        case OptimizerKind::HookeJeeves: return hooke_jeeves(fn, dims, budget, default_start);
        case OptimizerKind::NelderMead: return nelder_mead(fn, dims, budget, default_start);
        case OptimizerKind::Tpe: return tpe(fn, dims, budget);
        case OptimizerKind::MalherbePowell: return malherbe_powell(fn, dims, budget);
    }
    throw std::logic_error("run_search: bad kind");
}

}  // namespace occ
