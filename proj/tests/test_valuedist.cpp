#include "doctest.h"

#include <cmath>
#include <vector>

#include "gsp/errors.hpp"
#include "gsp/rng.hpp"
#include "gsp/valuedist.hpp"

#include "support/oracles.hpp"

using namespace gsp;

namespace {

double simpson_mass(const ValueDistribution& dist) {
    double lo = dist.quantile(1e-9);
    double hi = dist.quantile(1.0 - 1e-9);
    const int n = 200000;
    double h = (hi - lo) / n;
    double acc = dist.pdf(lo) + dist.pdf(hi);
    for (int k = 1; k < n; ++k) {
        acc += dist.pdf(lo + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

double fd_prime(const ValueDistribution& dist, double t) {
    double h = 1e-6 * std::max(1.0, std::abs(t));
    return (virtual_value(dist, t + h) - virtual_value(dist, t - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("distribution constructors validate parameters") {
    CHECK_THROWS_AS(ValueDistribution::uniform(1.0, 0.5), InvalidInput);
    CHECK_THROWS_AS(ValueDistribution::uniform(-0.1, 1.0), InvalidInput);
    CHECK_THROWS_AS(ValueDistribution::exponential(0.0), InvalidInput);
    CHECK_THROWS_AS(ValueDistribution::lognormal(0.0, 0.0), InvalidInput);
    CHECK_THROWS_AS(ValueDistribution::lognormal(std::nan(""), 1.0), InvalidInput);
    CHECK_NOTHROW(ValueDistribution::beta22());
}

TEST_CASE("closed form density, cdf and quantile agree") {
    std::vector<ValueDistribution> dists = {
        ValueDistribution::uniform(0.0, 1.0), ValueDistribution::exponential(1.0),
        ValueDistribution::lognormal(0.0, 1.0), ValueDistribution::beta22()};
    for (const auto& dist : dists) {
        CHECK(simpson_mass(dist) == doctest::Approx(1.0).epsilon(1e-6));
        for (int k = 1; k <= 19; ++k) {
            double u = k * 0.05;
            CHECK(dist.cdf(dist.quantile(u)) == doctest::Approx(u).epsilon(1e-9));
        }
    }

    ValueDistribution b22 = ValueDistribution::beta22();
    CHECK(b22.pdf(0.5) == doctest::Approx(1.5));
    CHECK(b22.cdf(0.5) == doctest::Approx(0.5));
    CHECK(b22.quantile(0.5) == doctest::Approx(0.5));
    CHECK_THROWS_AS(b22.quantile(0.0), InvalidInput);
    CHECK_THROWS_AS(b22.quantile(1.0), InvalidInput);
}

TEST_CASE("virtual value closed forms") {
    ValueDistribution uni = ValueDistribution::uniform(0.0, 1.0);
    ValueDistribution expo = ValueDistribution::exponential(1.0);
    ValueDistribution b22 = ValueDistribution::beta22();

    CHECK(virtual_value(uni, 0.75) == doctest::Approx(0.5));
    CHECK(virtual_value(expo, 2.5) == doctest::Approx(1.5));
    CHECK(std::abs(virtual_value(b22, 0.4215)) < 1e-3);

    CHECK(virtual_value_prime(uni, 0.3) == doctest::Approx(2.0));
    CHECK(virtual_value_prime(expo, 1.7) == doctest::Approx(1.0));
    CHECK(virtual_value_prime(b22, 1.0) == doctest::Approx(1.5));

    CHECK_THROWS_AS(virtual_value(uni, 1.5), UndefinedVirtualValue);
    CHECK_THROWS_AS(virtual_value(expo, -0.5), UndefinedVirtualValue);
    CHECK_THROWS_AS(virtual_value(b22, -0.1), UndefinedVirtualValue);
}

TEST_CASE("closed form derivative matches finite differences") {
    std::vector<ValueDistribution> dists = {ValueDistribution::uniform(0.0, 1.0),
                                            ValueDistribution::exponential(1.0),
                                            ValueDistribution::beta22()};
    for (const auto& dist : dists) {
        for (int k = 2; k <= 18; ++k) {
            double t = dist.quantile(k * 0.05);
            CHECK(virtual_value_prime(dist, t) == doctest::Approx(fd_prime(dist, t)).epsilon(1e-4));
        }
    }
}

TEST_CASE("hazard rate is monotone for the mhr kinds") {
    std::vector<ValueDistribution> dists = {ValueDistribution::uniform(0.0, 1.0),
                                            ValueDistribution::exponential(1.0),
                                            ValueDistribution::beta22()};
    for (const auto& dist : dists) {
        CHECK(dist.mhr());
        double prev = -1.0;
        for (int k = 1; k <= 198; ++k) {
            double t = dist.quantile(k * 0.005);
            double hz = dist.pdf(t) / (1.0 - dist.cdf(t));
            CHECK(hz >= prev - 1e-9);
            prev = hz;
        }
    }
    CHECK_FALSE(ValueDistribution::lognormal(0.0, 1.0).mhr());
}

TEST_CASE("virtual value is weakly convex for uniform and exponential") {
    std::vector<ValueDistribution> dists = {ValueDistribution::uniform(0.0, 1.0),
                                            ValueDistribution::exponential(1.0)};
    for (const auto& dist : dists) {
        for (int k = 1; k <= 17; ++k) {
            double a = dist.quantile(k * 0.05);
            double b = dist.quantile((k + 2) * 0.05);
            double mid = virtual_value(dist, 0.5 * (a + b));
            double chord = 0.5 * (virtual_value(dist, a) + virtual_value(dist, b));
            CHECK(mid <= chord + 1e-12);
        }
    }
}

TEST_CASE("reserve root values") {
    CHECK(reserve_root(ValueDistribution::uniform(0.0, 1.0)) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(reserve_root(ValueDistribution::exponential(1.0)) == doctest::Approx(1.0).epsilon(1e-6));

    double exact = (1.0 + std::sqrt(33.0)) / 16.0;
    double root = reserve_root(ValueDistribution::beta22());
    CHECK(root == doctest::Approx(exact).epsilon(1e-6));
    CHECK(std::abs(root - 0.4215) < 1e-3);
    CHECK(virtual_value(ValueDistribution::beta22(), root - 1e-4) < 0.0);
    CHECK(virtual_value(ValueDistribution::beta22(), root + 1e-4) > 0.0);

    CHECK_THROWS_AS(reserve_root(ValueDistribution::uniform(2.0, 3.0)), NoRoot);
}

TEST_CASE("dominance condition threshold") {
    ValueDistribution uni = ValueDistribution::uniform(0.0, 1.0);
    for (double r : {0.1, 0.3, 0.5}) {
        CHECK(maincond_threshold(uni, r) == doctest::Approx(0.5).epsilon(1e-6));
    }
    CHECK(maincond_threshold(ValueDistribution::exponential(1.0), 0.5) ==
          doctest::Approx(1.0).epsilon(1e-6));
    double b22 = maincond_threshold(ValueDistribution::beta22(), 0.35);
    CHECK(std::abs(b22 - 1.0 / 3.0) < 1e-3);

    CHECK_THROWS_AS(maincond_threshold(uni, 0.0), InvalidInput);
    CHECK_THROWS_AS(maincond_threshold(uni, 0.6), InvalidInput);
}

TEST_CASE("small reserves push the beta threshold below one third") {
    double t = maincond_threshold(ValueDistribution::beta22(), 0.05);
    CHECK(t < 1.0 / 3.0 - 1e-3);
}

TEST_CASE("population sampling is deterministic") {
    PopulationModel model{ValueDistribution::uniform(0.0, 1.0),
                          ValueDistribution::uniform(0.5, 1.0), 0.0};
    auto a = sample_population(model, 16, 42);
    auto b = sample_population(model, 16, 42);
    auto c = sample_population(model, 16, 43);
    REQUIRE(a.size() == 16);
    bool same = true, differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        same = same && a[i].value == b[i].value && a[i].relevance == b[i].relevance;
        differs = differs || a[i].value != c[i].value;
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("zero copula correlation gives independent coordinates") {
    PopulationModel model{ValueDistribution::uniform(0.0, 1.0),
                          ValueDistribution::uniform(0.0, 1.0), 0.0};
    auto draws = sample_population(model, 100000, 7);
    std::vector<double> xs, ys;
    for (const auto& b : draws) {
        xs.push_back(b.value);
        ys.push_back(b.relevance);
    }
    double rho = oracles::pearson(xs, ys);
    CHECK(std::abs(rho) < 0.01);
}

TEST_CASE("copula correlation shows up in the rank correlation") {
    PopulationModel model{ValueDistribution::lognormal(0.0, 1.0),
                          ValueDistribution::uniform(0.5, 1.0), 0.5};
    auto draws = sample_population(model, 20000, 9);
    std::vector<double> xs, ys;
    for (const auto& b : draws) {
        xs.push_back(b.value);
        ys.push_back(b.relevance);
    }
    double want = 6.0 / std::acos(-1.0) * std::asin(0.25);
    CHECK(oracles::spearman(xs, ys) == doctest::Approx(want).epsilon(0.07));
}

TEST_CASE("population validation") {
    PopulationModel bad_corr{ValueDistribution::uniform(0.0, 1.0),
                             ValueDistribution::uniform(0.0, 1.0), 1.5};
    CHECK_THROWS_AS(bad_corr.validate(), InvalidInput);

    PopulationModel wide_relevance{ValueDistribution::uniform(0.0, 1.0),
                                   ValueDistribution::lognormal(0.0, 1.0), 0.0};
    CHECK_NOTHROW(wide_relevance.validate());
    CHECK_THROWS_AS(wide_relevance.validate_for_auction(), InvalidInput);

    PopulationModel ok{ValueDistribution::uniform(0.0, 1.0),
                       ValueDistribution::uniform(0.0, 1.0), 0.0};
    CHECK_NOTHROW(ok.validate_for_auction());
}

TEST_CASE("expected truncated virtual value matches the tail identity") {
    struct Case {
        ValueDistribution dist;
        double cut;
    };
    std::vector<Case> cases = {{ValueDistribution::uniform(0.0, 1.0), 0.3},
                               {ValueDistribution::exponential(1.0), 0.5},
                               {ValueDistribution::beta22(), 0.3}};
    for (const auto& c : cases) {
        Rng rng(mix_seed(5, 1));
        std::vector<double> draws;
        for (int k = 0; k < 20000; ++k) {
            double t = c.dist.sample(rng);
            draws.push_back(t >= c.cut ? virtual_value(c.dist, t) : 0.0);
        }
        auto stat = oracles::mc_summary(draws);
        double want = c.cut * (1.0 - c.dist.cdf(c.cut));
        CHECK(std::abs(stat.mean - want) <= 3.0 * stat.se);
    }
}
