#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gsp/errors.hpp"
#include "gsp/model.hpp"
#include "gsp/rng.hpp"

#include "support/oracles.hpp"

using namespace gsp;

namespace {

Realisation two_bidder_instance() {
    Realisation real;
    real.slots = SlotCurve({1.0, 0.5});
    real.bidders = {{1.0, 0.7, 0}, {0.6, 1.0, 1}};
    return real;
}

}  // namespace

TEST_CASE("slot curve validation") {
    CHECK_NOTHROW(SlotCurve({1.0, 0.5, 0.25}));
    CHECK_THROWS_AS(SlotCurve(std::vector<double>{}), InvalidInput);
    CHECK_THROWS_AS(SlotCurve({1.0, 1.0}), InvalidInput);
    CHECK_THROWS_AS(SlotCurve({0.5, 1.0}), InvalidInput);
    CHECK_THROWS_AS(SlotCurve({1.0, 0.0}), InvalidInput);
    CHECK_THROWS_AS(SlotCurve({-1.0}), InvalidInput);

    SlotCurve g = SlotCurve::geometric(5, 0.5);
    CHECK(g.size() == 5);
    CHECK(g.effect(0) == doctest::Approx(1.0));
    CHECK(g.effect(4) == doctest::Approx(0.0625));
    CHECK_THROWS_AS(SlotCurve::geometric(0, 0.5), InvalidInput);
    CHECK_THROWS_AS(SlotCurve::geometric(3, 1.0), InvalidInput);
}

TEST_CASE("score values per family") {
    CHECK(score(RankingSpec::proposed(0.5), 0.5, 0.9) == 0.0);
    CHECK(score(RankingSpec::standard_filter(0.5), 0.6, 1.0) == doctest::Approx(0.6));
    CHECK(score(RankingSpec::standard_filter(0.5), 0.4, 1.0) == 0.0);
    CHECK(score(RankingSpec::squashed(0.5, 0.1), 0.4, 0.25) == doctest::Approx(0.1));
    CHECK(score(RankingSpec::by_bid(), 0.8, 0.3) == doctest::Approx(0.8));
    CHECK(score(RankingSpec::standard(), 0.8, 0.3) == doctest::Approx(0.24));

    RankingSpec general = RankingSpec::general([](double w) { return 0.4 + 0.6 * w * w; },
                                               [](double w) { return 0.05 + 0.1 * w; });
    CHECK(score(general, 0.5, 1.0) == doctest::Approx(0.5 - 0.15));
}

TEST_CASE("score input validation") {
    RankingSpec spec = RankingSpec::standard();
    CHECK_THROWS_AS(score(spec, -0.1, 0.5), InvalidInput);
    CHECK_THROWS_AS(score(spec, 0.5, 0.0), InvalidInput);
    CHECK_THROWS_AS(score(spec, 0.5, 1.5), InvalidInput);
    CHECK_THROWS_AS(score(spec, std::nan(""), 0.5), InvalidInput);
}

TEST_CASE("score is monotone in the bid") {
    std::vector<RankingSpec> specs = {RankingSpec::by_bid(0.1), RankingSpec::standard(),
                                      RankingSpec::squashed(0.5, 0.05),
                                      RankingSpec::proposed(0.3),
                                      RankingSpec::standard_filter(0.3)};
    for (const auto& spec : specs) {
        double prev = -1.0;
        for (int k = 0; k <= 40; ++k) {
            double s = score(spec, k * 0.025, 0.6);
            CHECK(s >= prev);
            prev = s;
        }
    }
}

TEST_CASE("ranking spec validation") {
    RankingSpec bad = RankingSpec::standard_filter(0.3);
    bad.reserve_score = 0.1;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);

    RankingSpec by_bid_r = RankingSpec::by_bid();
    by_bid_r.reserve_price = 0.2;
    CHECK_THROWS_AS(by_bid_r.validate(), InvalidInput);

    RankingSpec no_fns;
    no_fns.family = RankFamily::GeneralGH;
    CHECK_THROWS_AS(no_fns.validate(), InvalidInput);

    CHECK_THROWS_AS(RankingSpec::squashed(-0.5), InvalidInput);
    CHECK_NOTHROW(RankingSpec::squashed(0.0).validate());
}

TEST_CASE("spec labels") {
    CHECK(RankingSpec::standard().label() == "standard");
    CHECK(RankingSpec::standard_filter(0.3).label() == "standard_r");
    CHECK(RankingSpec::squashed(0.5, 0.1).label() == "squashed_rho");
    CHECK(RankingSpec::proposed(0.2).label() == "proposed");
    CHECK(RankingSpec::by_bid().label() == "by_bid");
}

TEST_CASE("allocate on the two bidder filtered instance") {
    Realisation real = two_bidder_instance();
    RankingSpec spec = RankingSpec::standard_filter(0.5);
    Assignment asg = allocate(spec, {1.0, 0.6}, real);

    CHECK(asg.order == std::vector<int>{0, 1});
    CHECK(asg.slotted == 2);
    CHECK(asg.allocations[0] == doctest::Approx(1.0));
    CHECK(asg.allocations[1] == doctest::Approx(0.5));
    CHECK(asg.prices[0] == doctest::Approx(0.6 / 0.7));
    CHECK(asg.prices[1] == doctest::Approx(0.5));
}

TEST_CASE("allocate excludes everyone below the filter") {
    Realisation real = two_bidder_instance();
    RankingSpec spec = RankingSpec::standard_filter(0.7);
    Assignment asg = allocate(spec, {0.65, 0.6}, real);
    CHECK(asg.slotted == 0);
    CHECK(asg.order.empty());
    CHECK(asg.allocations == std::vector<double>{0.0, 0.0});
    CHECK(asg.prices == std::vector<double>{0.0, 0.0});
}

TEST_CASE("allocate with an embedded reserve drops zero scores") {
    Realisation real;
    real.slots = SlotCurve({1.0, 0.5});
    real.bidders = {{1.0, 1.0, 0}, {0.5, 1.0, 1}, {0.1, 1.0, 2}};
    RankingSpec spec = RankingSpec::proposed(0.2);
    Assignment asg = allocate(spec, {1.0, 0.5, 0.1}, real);

    CHECK(asg.order == std::vector<int>{0, 1});
    CHECK(asg.allocations[0] == doctest::Approx(1.0));
    CHECK(asg.allocations[1] == doctest::Approx(0.5));
    CHECK(asg.allocations[2] == 0.0);
    CHECK(asg.prices[0] == doctest::Approx(0.5));
    CHECK(asg.prices[1] == doctest::Approx(0.2));
    CHECK(asg.prices[2] == 0.0);
}

TEST_CASE("allocate breaks score ties by bidder id") {
    Realisation real;
    real.slots = SlotCurve({1.0, 0.5});
    real.bidders = {{0.5, 1.0, 0}, {0.5, 1.0, 1}, {0.5, 1.0, 2}};
    Assignment asg = allocate(RankingSpec::standard(), {0.5, 0.5, 0.5}, real);
    CHECK(asg.order == std::vector<int>{0, 1, 2});
    CHECK(asg.allocations[0] == doctest::Approx(1.0));
    CHECK(asg.allocations[1] == doctest::Approx(0.5));
    CHECK(asg.allocations[2] == 0.0);
}

TEST_CASE("allocate input validation") {
    Realisation real = two_bidder_instance();
    CHECK_THROWS_AS(allocate(RankingSpec::standard(), {0.5}, real), InvalidInput);
    Realisation bad = real;
    bad.bidders[0].value = -1.0;
    CHECK_THROWS_AS(allocate(RankingSpec::standard(), {0.5, 0.5}, bad), InvalidInput);
}

TEST_CASE("gsp price examples") {
    RankingSpec proposed = RankingSpec::proposed(0.2);
    double next = score(proposed, 0.35, 1.0);
    CHECK(next == doctest::Approx(0.15));
    CHECK(gsp_price(proposed, next, 1.0) == doctest::Approx(0.35));

    CHECK(gsp_price(RankingSpec::standard(), 0.0, 0.8) == 0.0);
    CHECK(gsp_price(RankingSpec::standard_filter(0.5), 0.0, 0.7) == doctest::Approx(0.5));
    CHECK_THROWS_AS(gsp_price(RankingSpec::standard(), -0.1, 0.5), InvalidInput);
    CHECK_THROWS_AS(gsp_price(RankingSpec::standard(), 0.1, 0.0), InvalidInput);
}

TEST_CASE("embedded reserve price identity") {
    Rng rng(11);
    for (int k = 0; k < 200; ++k) {
        double r = 0.05 + 0.4 * rng.uniform();
        RankingSpec spec = RankingSpec::proposed(r);
        double w_next = 0.05 + 0.95 * rng.uniform();
        double w_own = 0.05 + 0.95 * rng.uniform();
        double b_next = r + (1.0 - r) * rng.uniform();
        double next = score(spec, b_next, w_next);
        double got = gsp_price(spec, next, w_own);
        double want = b_next * (w_next / w_own) + r * (1.0 - w_next / w_own);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("charged price is the minimum bid that keeps the slot") {
    Rng rng(7);
    std::vector<RankingSpec> specs = {
        RankingSpec::by_bid(0.05), RankingSpec::standard(), RankingSpec::squashed(0.7, 0.05),
        RankingSpec::proposed(0.3), RankingSpec::standard_filter(0.3),
        RankingSpec::general([](double w) { return 0.4 + 0.6 * w * w; },
                             [](double w) { return 0.05 + 0.1 * w; })};
    const double eps = 1e-6;
    for (const auto& spec : specs) {
        for (int k = 0; k < 40; ++k) {
            Realisation real = oracles::random_instance(rng, 5, {1.0, 0.6, 0.3});
            std::vector<double> bids;
            for (const auto& b : real.bidders) bids.push_back(b.value);
            Assignment asg = allocate(spec, bids, real);
            for (std::size_t i = 0; i < bids.size(); ++i) {
                double x = asg.allocations[i];
                double p = asg.prices[i];
                if (x <= 0.0 || p <= 1e-5) continue;
                double kept = oracles::allocation_at_bid(spec, real, i, p + eps);
                double lost = oracles::allocation_at_bid(spec, real, i, std::max(0.0, p - eps));
                CHECK(kept == doctest::Approx(x));
                CHECK(lost < x);
            }
        }
    }
}

TEST_CASE("allocate is equivariant under bidder relabelling") {
    Rng rng(23);
    RankingSpec spec = RankingSpec::squashed(0.5, 0.02);
    for (int k = 0; k < 30; ++k) {
        Realisation real = oracles::random_instance(rng, 6, {1.0, 0.5, 0.25});
        std::vector<double> bids;
        for (const auto& b : real.bidders) bids.push_back(b.value);
        Assignment base = allocate(spec, bids, real);

        Realisation rev = real;
        std::reverse(rev.bidders.begin(), rev.bidders.end());
        std::vector<double> rev_bids(bids.rbegin(), bids.rend());
        Assignment flipped = allocate(spec, rev_bids, rev);

        std::size_t n = bids.size();
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(base.allocations[i] == doctest::Approx(flipped.allocations[n - 1 - i]));
            CHECK(base.prices[i] == doctest::Approx(flipped.prices[n - 1 - i]));
        }
    }
}
