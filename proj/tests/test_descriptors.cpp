#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "occ/descriptors.hpp"
#include "oracles.hpp"

using namespace occ;

namespace {

Matrix random_target(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = g(rng);
    return m;
}

double fit_and_score(DescriptorKind kind, const Matrix& target, const HyperParams& p,
                     std::span<const double> y) {
    return fit_descriptor(kind, target, p)->score(y);
}

}  // namespace

TEST_CASE("descriptor names round-trip") {
    for (auto k : {DescriptorKind::NND, DescriptorKind::LNND, DescriptorKind::LOF,
                   DescriptorKind::ALP, DescriptorKind::SVM})
        CHECK(descriptor_from_string(to_string(k)) == k);
    CHECK_THROWS(descriptor_from_string("bogus"));
}

TEST_CASE("k domain caps") {
    // min(n, ceil(100 ln n)) for neighbour kinds, 5n for ALP
    CHECK(k_domain_max(DescriptorKind::NND, 10) == 10);
    CHECK(k_domain_max(DescriptorKind::LNND, 10) == 10);
    CHECK(k_domain_max(DescriptorKind::LOF, 1000) ==
          static_cast<std::size_t>(std::ceil(100.0 * std::log(1000.0))));
    CHECK(k_domain_max(DescriptorKind::ALP, 10) == 50);
}

TEST_CASE("default hyperparameter values") {
    CHECK(default_params(DescriptorKind::NND, 100).k == 1);
    CHECK(default_params(DescriptorKind::LNND, 100).k == 1);
    CHECK(default_params(DescriptorKind::LOF, 100).k == 10);
    const auto alp = default_params(DescriptorKind::ALP, 100);
    CHECK(alp.k == static_cast<std::size_t>(std::ceil(5.5 * std::log(100.0))));
    CHECK(alp.l == static_cast<std::size_t>(std::ceil(6.0 * std::log(100.0))));
    const auto svm = default_params(DescriptorKind::SVM, 100);
    CHECK(svm.nu == 0.5);
    CHECK(svm.c_prime == 0.5);
}

TEST_CASE("linear weights") {
    SUBCASE("p=3 untruncated") {
        const auto w = linear_weights(3, 3);
        REQUIRE(w.size() == 3);
        CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(w[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(w[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    }
    SUBCASE("p=1") {
        const auto w = linear_weights(1, 5);
        REQUIRE(w.size() == 1);
        CHECK(w[0] == 1.0);
    }
    SUBCASE("p=5 truncated at 2") {
        const auto w = linear_weights(5, 2);
        REQUIRE(w.size() == 2);
        CHECK(w[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
        CHECK(w[1] == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
    }
    SUBCASE("weights always sum to 1") {
        std::mt19937_64 rng(5);
        for (int t = 0; t < 50; ++t) {
            const std::size_t p = 1 + rng() % 40;
            const std::size_t cut = 1 + rng() % 40;
            const auto w = linear_weights(p, cut);
            double s = 0.0;
            for (double v : w) s += v;
            CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("matches the independent oracle") {
        for (std::size_t p : {2u, 7u, 13u})
            for (std::size_t cut : {1u, 4u, 20u}) {
                const auto a = linear_weights(p, cut);
                const auto b = oracle::linear_weights(p, cut);
                REQUIRE(a.size() == b.size());
                for (std::size_t i = 0; i < a.size(); ++i)
                    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
            }
    }
}

TEST_CASE("nearest-neighbour distance scores") {
    const Matrix target = Matrix::from_rows({{0.0}, {1.0}, {3.0}});
    const std::vector<double> y{2.0};
    CHECK(fit_and_score(DescriptorKind::NND, target, {.k = 1}, y) == -1.0);
    // distances {2,1,1} sorted [1,1,2]; the 2nd is still 1
    CHECK(fit_and_score(DescriptorKind::NND, target, {.k = 2}, y) == -1.0);
    CHECK(fit_and_score(DescriptorKind::NND, target, {.k = 3}, y) == -2.0);
    CHECK(fit_and_score(DescriptorKind::NND, target, {.k = 1}, std::vector<double>{1.0}) == 0.0);
    CHECK_THROWS(fit_descriptor(DescriptorKind::NND, target, {.k = 4}));
    CHECK_THROWS(fit_descriptor(DescriptorKind::NND, target, {.k = 0}));
}

TEST_CASE("localised NND scores") {
    SUBCASE("hand-worked ratio") {
        const Matrix target = Matrix::from_rows({{0.0}, {1.0}, {4.0}});
        // d_1(3) = 1 with NN = point 4; d_1(4) without itself = 3
        CHECK(fit_and_score(DescriptorKind::LNND, target, {.k = 1}, std::vector<double>{3.0}) ==
              doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
    }
    SUBCASE("query on a training point") {
        const Matrix target = Matrix::from_rows({{0.0}, {1.0}, {4.0}});
        CHECK(fit_and_score(DescriptorKind::LNND, target, {.k = 1}, std::vector<double>{1.0}) ==
              0.0);
    }
    SUBCASE("zero denominator rules") {
        const Matrix dup = Matrix::from_rows({{0.0}, {0.0}, {9.0}});
        // positive numerator over zero denominator: most anomalous sentinel
        CHECK(fit_and_score(DescriptorKind::LNND, dup, {.k = 1}, std::vector<double>{1.0}) ==
              kMostAnomalous);
        // zero over zero: treated as ratio 1
        CHECK(fit_and_score(DescriptorKind::LNND, dup, {.k = 1}, std::vector<double>{0.0}) ==
              -1.0);
    }
    SUBCASE("matches the oracle on random instances") {
        std::mt19937_64 rng(11);
        for (int t = 0; t < 30; ++t) {
            const auto target = random_target(rng, 12, 3);
            const auto model =
                fit_descriptor(DescriptorKind::LNND, target, {.k = 1 + t % 10});
            std::vector<double> y(3);
            std::normal_distribution<double> g;
            for (double& v : y) v = g(rng);
            CHECK(model->score(y) ==
                  doctest::Approx(oracle::lnnd(target, y, 1 + t % 10)).epsilon(1e-9));
        }
    }
}

TEST_CASE("local outlier factor scores") {
    SUBCASE("interior point of a uniform grid") {
        Matrix target;
        for (int i = 0; i <= 10; ++i)
            if (i != 5) target.push_row(std::vector<double>{static_cast<double>(i)});
        const auto model = fit_descriptor(DescriptorKind::LOF, target, {.k = 2});
        const double s = model->score(std::vector<double>{5.0});
        CHECK(s == doctest::Approx(oracle::lof(target, std::vector<double>{5.0}, 2)).epsilon(1e-12));
        CHECK(s == doctest::Approx(-1.0).epsilon(0.35));  // interior uniform density
    }
    SUBCASE("duplicated training point") {
        const Matrix target = Matrix::from_rows({{0.0}, {0.0}, {5.0}});
        CHECK(fit_and_score(DescriptorKind::LOF, target, {.k = 1}, std::vector<double>{0.0}) ==
              -1.0);
    }
    SUBCASE("matches the textbook oracle on random instances") {
        std::mt19937_64 rng(23);
        for (int t = 0; t < 30; ++t) {
            const auto target = random_target(rng, 15, 2);
            const std::size_t k = 1 + t % 8;
            const auto model = fit_descriptor(DescriptorKind::LOF, target, {.k = k});
            std::vector<double> y(2);
            std::normal_distribution<double> g;
            for (double& v : y) v = g(rng);
            CHECK(model->score(y) == doctest::Approx(oracle::lof(target, y, k)).epsilon(1e-9));
        }
    }
}

TEST_CASE("average localised proximity scores") {
    SUBCASE("hand-worked tiny instance") {
        const Matrix target = Matrix::from_rows({{0.0}, {1.0}, {2.0}, {4.0}});
        const auto model = fit_descriptor(DescriptorKind::ALP, target, {.k = 2, .l = 2});
        const double got = model->score(std::vector<double>{3.0});
        CHECK(got == doctest::Approx(oracle::alp(target, std::vector<double>{3.0}, 2, 2))
                         .epsilon(1e-12));
    }
    SUBCASE("duplicate of a dense training point scores 1") {
        const Matrix target = Matrix::from_rows({{0.0}, {0.0}, {0.0}, {7.0}});
        CHECK(fit_and_score(DescriptorKind::ALP, target, {.k = 2, .l = 2},
                            std::vector<double>{0.0}) == 1.0);
    }
    SUBCASE("scores stay in (0, 1]") {
        std::mt19937_64 rng(31);
        const auto target = random_target(rng, 20, 3);
        const auto model = fit_descriptor(DescriptorKind::ALP, target, {.k = 5, .l = 3});
        std::normal_distribution<double> g;
        for (int t = 0; t < 50; ++t) {
            std::vector<double> y(3);
            for (double& v : y) v = 3.0 * g(rng);
            const double s = model->score(y);
            CHECK(s > 0.0);
            CHECK(s <= 1.0);
        }
    }
    SUBCASE("matches the direct-formula oracle on random instances") {
        std::mt19937_64 rng(37);
        for (int t = 0; t < 40; ++t) {
            const std::size_t n = 5 + rng() % 16;
            const auto target = random_target(rng, n, 1 + t % 4);
            const std::size_t k = 1 + rng() % (5 * n);
            const std::size_t l = 1 + rng() % (5 * n);
            const auto model = fit_descriptor(DescriptorKind::ALP, target, {.k = k, .l = l});
            std::vector<double> y(target.cols());
            std::normal_distribution<double> g;
            for (double& v : y) v = g(rng);
            CHECK(model->score(y) == doctest::Approx(oracle::alp(target, y, k, l)).epsilon(1e-12));
        }
    }
    SUBCASE("k and l above 5n are rejected") {
        const Matrix target = Matrix::from_rows({{0.0}, {1.0}, {2.0}});
        CHECK_THROWS(fit_descriptor(DescriptorKind::ALP, target, {.k = 16, .l = 1}));
        CHECK_THROWS(fit_descriptor(DescriptorKind::ALP, target, {.k = 1, .l = 16}));
    }
}

TEST_CASE("truncation depth never exceeds n - 1") {
    CHECK(alp_truncation(2) == 1);
    CHECK(alp_truncation(5) == 4);
    CHECK(alp_truncation(1000) ==
          static_cast<std::size_t>(std::ceil(20.0 * std::log(1000.0))));
    CHECK_THROWS(alp_truncation(1));
}

TEST_CASE("fitted descriptors serialise to JSON") {
    const Matrix target = Matrix::from_rows({{0.0}, {1.0}, {3.0}});
    for (auto kind : {DescriptorKind::NND, DescriptorKind::LNND, DescriptorKind::LOF,
                      DescriptorKind::ALP}) {
        const auto model = fit_descriptor(kind, target, {.k = 1, .l = 1});
        CHECK(model->to_json().find(to_string(kind)) != std::string::npos);
    }
}
