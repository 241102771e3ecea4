#include "doctest.h"

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gsp/errors.hpp"
#include "gsp/model.hpp"
#include "gsp/replay.hpp"

#include "support/oracles.hpp"

using namespace gsp;

namespace {

LogSpec small_thin(long auctions, std::uint64_t seed) {
    LogSpec spec = LogSpec::thin();
    spec.auctions = auctions;
    spec.seed = seed;
    return spec;
}

std::vector<LogRecord> one_auction_log() {
    LogRecord a{"a0", "b0", 1.0, 0.7, 2};
    LogRecord b{"a0", "b1", 0.6, 1.0, 2};
    return {a, b};
}

double total_revenue(const std::vector<ReplayRow>& rows, const std::string& spec, double r) {
    for (const auto& row : rows) {
        if (row.spec == spec && row.r == r) return row.revenue;
    }
    REQUIRE(false);
    return 0.0;
}

}  // namespace

TEST_CASE("log spec validation") {
    CHECK_NOTHROW(LogSpec::thick().validate());
    CHECK_NOTHROW(LogSpec::thin().validate());

    LogSpec no_atoms = LogSpec::thin();
    no_atoms.atoms.clear();
    CHECK_THROWS_AS(no_atoms.validate(), InvalidInput);

    LogSpec crowded_thin = LogSpec::thin();
    crowded_thin.bidders = 25;
    CHECK_THROWS_AS(crowded_thin.validate(), InvalidInput);

    LogSpec heavy_atoms = LogSpec::thin();
    heavy_atoms.atoms = {{0.4, 0.7}, {0.5, 0.6}};
    CHECK_THROWS_AS(heavy_atoms.validate(), InvalidInput);

    LogSpec bad_range = LogSpec::thick();
    bad_range.bid_lower = 0.9;
    bad_range.bid_upper = 0.5;
    CHECK_THROWS_AS(bad_range.validate(), InvalidInput);
}

TEST_CASE("log generation is deterministic") {
    LogSpec spec = small_thin(50, 21);
    auto a = generate_log(spec);
    auto b = generate_log(spec);
    REQUIRE(a.size() == b.size());
    bool same = true;
    for (std::size_t k = 0; k < a.size(); ++k) {
        same = same && a[k].auction_id == b[k].auction_id && a[k].bid == b[k].bid &&
               a[k].relevance == b[k].relevance;
    }
    CHECK(same);

    spec.seed = 22;
    auto c = generate_log(spec);
    bool differs = false;
    for (std::size_t k = 0; k < a.size(); ++k) differs = differs || a[k].bid != c[k].bid;
    CHECK(differs);
}

TEST_CASE("thick generation covers every auction and bidder") {
    LogSpec spec = LogSpec::thick();
    spec.auctions = 40;
    spec.bidders = 30;
    auto records = generate_log(spec);
    CHECK(records.size() == 1200);
    CHECK(records[0].auction_id == "a0");
    CHECK(records[0].bidder_id == "b0");
    CHECK(records.back().auction_id == "a39");
    for (const auto& rec : records) {
        CHECK(rec.slot_count == 5);
        CHECK(rec.bid >= 0.0);
        CHECK(rec.relevance > 0.0);
        CHECK(rec.relevance <= 1.0);
    }
}

TEST_CASE("thin generation places the advertised mass on the atom") {
    LogSpec spec = small_thin(2000, 77);
    REQUIRE(spec.atoms.size() == 1);
    REQUIRE(spec.atoms[0].bid == 0.4);
    auto records = generate_log(spec);
    long hits = 0;
    for (const auto& rec : records) {
        if (rec.bid == 0.4) ++hits;
    }
    double share = static_cast<double>(hits) / records.size();
    CHECK(share == doctest::Approx(0.3).epsilon(0.07));
}

TEST_CASE("csv round trip preserves every record bit for bit") {
    auto records = generate_log(small_thin(40, 5));
    std::ostringstream out;
    write_log_csv(out, records);

    std::istringstream in(out.str());
    LogReadResult back = read_log_csv(in);
    CHECK(back.rejected == 0);
    REQUIRE(back.records.size() == records.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
        CHECK(back.records[k].auction_id == records[k].auction_id);
        CHECK(back.records[k].bidder_id == records[k].bidder_id);
        CHECK(back.records[k].bid == records[k].bid);
        CHECK(back.records[k].relevance == records[k].relevance);
        CHECK(back.records[k].slot_count == records[k].slot_count);
    }
}

TEST_CASE("malformed csv rows are rejected with a count") {
    std::string text =
        "auction_id,bidder_id,bid,relevance,slot_count\n"
        "a0,b0,0.5,0.8,2\n"
        "a0,b1,0.4,0.9\n"
        "a0,,0.4,0.9,2\n"
        "a0,b2,-0.1,0.9,2\n"
        "a0,b3,0.4,0.0,2\n"
        "a0,b4,0.4,1.5,2\n"
        "a0,b5,oops,0.9,2\n"
        "a0,b6,0.3,0.9,0\n"
        "a0,b7,0.3,0.9,2\n";
    std::istringstream in(text);
    LogReadResult result = read_log_csv(in);
    CHECK(result.records.size() == 2);
    CHECK(result.rejected == 7);

    std::istringstream bad_header("auction,bidder,bid,relevance,slots\na0,b0,0.5,0.8,2\n");
    CHECK_THROWS_AS(read_log_csv(bad_header), ConfigError);
}

TEST_CASE("grouping keeps first appearance order and drops conflicts") {
    std::vector<LogRecord> records = {{"a1", "b0", 0.5, 0.8, 2},
                                      {"a0", "b0", 0.4, 0.9, 2},
                                      {"a1", "b1", 0.6, 0.7, 2},
                                      {"a1", "b2", 0.6, 0.7, 3}};
    GroupedLog grouped = group_log(records);
    REQUIRE(grouped.auctions.size() == 2);
    CHECK(grouped.rejected == 1);
    CHECK(grouped.auctions[0].bids.size() == 2);
    CHECK(grouped.auctions[0].bids[0] == 0.5);
    CHECK(grouped.auctions[1].bids[0] == 0.4);
    CHECK(grouped.auctions[0].slot_count == 2);
}

TEST_CASE("replay rule labels and construction") {
    ReplayRule plain;
    CHECK(plain.label() == "standard");
    CHECK_FALSE(plain.make(0.2).has_bid_filter());
    CHECK(plain.make(0.2).reserve_score == doctest::Approx(0.2));

    ReplayRule filter{RankFamily::Standard, true, 1.0};
    CHECK(filter.label() == "standard_filter");
    CHECK(filter.make(0.2).has_bid_filter());
    CHECK_FALSE(filter.make(0.0).has_bid_filter());

    ReplayRule proposed{RankFamily::Proposed, false, 1.0};
    CHECK(proposed.label() == "proposed");
    CHECK(proposed.make(0.2).reserve_price == doctest::Approx(0.2));

    ReplayRule squashed{RankFamily::Squashed, true, 0.5};
    CHECK(squashed.label() == "squashed_filter_a0.5");

    ReplayRule general{RankFamily::GeneralGH, false, 1.0};
    CHECK_THROWS_AS(general.make(0.1), UnsupportedRanking);

    ReplayRule bad_filter{RankFamily::Proposed, true, 1.0};
    CHECK_THROWS_AS(bad_filter.validate(), InvalidInput);
}

TEST_CASE("single auction replay matches hand arithmetic") {
    GroupedLog grouped = group_log(one_auction_log());
    REQUIRE(grouped.auctions.size() == 1);

    std::vector<ReplayRule> rules = {{RankFamily::Standard, true, 1.0},
                                     {RankFamily::Proposed, false, 1.0}};
    auto rows = replay_sweep(grouped, rules, {0.5});
    REQUIRE(rows.size() == 2);

    double filtered = total_revenue(rows, "standard_filter", 0.5);
    CHECK(filtered == doctest::Approx(0.6 / 0.7 * 0.7 * 1.0 + 0.5 * 1.0 * 0.5).epsilon(1e-12));

    double proposed = total_revenue(rows, "proposed", 0.5);
    double p_top = (0.6 - 0.5) * 1.0 / 0.7 + 0.5;
    CHECK(proposed == doctest::Approx(p_top * 0.7 * 1.0 + 0.5 * 1.0 * 0.5).epsilon(1e-12));
}

TEST_CASE("reserves above every bid drive revenue to zero") {
    GroupedLog grouped = group_log(generate_log(small_thin(30, 3)));
    std::vector<ReplayRule> rules = {{RankFamily::Standard, true, 1.0},
                                     {RankFamily::Proposed, false, 1.0},
                                     {RankFamily::ByBid, false, 1.0}};
    auto rows = replay_sweep(grouped, rules, {2.0});
    for (const auto& row : rows) {
        CHECK(row.revenue == 0.0);
        CHECK(row.click_yield == 0.0);
    }
}

TEST_CASE("replay sweeps are deterministic") {
    GroupedLog grouped = group_log(generate_log(small_thin(60, 8)));
    std::vector<ReplayRule> rules = {{RankFamily::Standard, true, 1.0}};
    std::vector<double> grid = {0.1, 0.3, 0.5};
    auto a = replay_sweep(grouped, rules, grid);
    auto b = replay_sweep(grouped, rules, grid);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].revenue == b[k].revenue);
        CHECK(a[k].click_yield == b[k].click_yield);
    }
}

TEST_CASE("minimum bid drops low records before ranking") {
    std::vector<LogRecord> records = one_auction_log();
    records.push_back({"a0", "b2", 0.01, 1.0, 2});
    GroupedLog grouped = group_log(records);

    ReplayOptions options;
    options.min_bid = 0.05;
    std::vector<ReplayRule> rules = {{RankFamily::Standard, false, 1.0}};
    auto with_floor = replay_sweep(grouped, rules, {0.0}, options);
    auto baseline = replay_sweep(group_log(one_auction_log()), rules, {0.0});
    CHECK(with_floor[0].revenue == doctest::Approx(baseline[0].revenue).epsilon(1e-12));
}

TEST_CASE("atom crossings are one sided and larger for the filtered rule") {
    GroupedLog grouped = group_log(generate_log(small_thin(400, 13)));
    std::vector<ReplayRule> filter = {{RankFamily::Standard, true, 1.0}};
    std::vector<ReplayRule> proposed = {{RankFamily::Proposed, false, 1.0}};
    const double atom = 0.4;
    const double step = 1e-6;

    auto f = replay_sweep(grouped, filter, {atom - step, atom, atom + step});
    double f_left = std::abs(f[1].revenue - f[0].revenue);
    double f_right = std::abs(f[2].revenue - f[1].revenue);
    CHECK(f_left < 0.01);
    CHECK(f_right > 1.0);

    auto p = replay_sweep(grouped, proposed, {atom - step, atom, atom + step});
    double p_left = std::abs(p[1].revenue - p[0].revenue);
    double p_right = std::abs(p[2].revenue - p[1].revenue);
    CHECK(p_right < 0.01);
    CHECK(f_right > p_left);

    auto f_mid = replay_sweep(grouped, filter, {0.3 - step, 0.3 + step});
    auto p_mid = replay_sweep(grouped, proposed, {0.3 - step, 0.3 + step});
    CHECK(std::abs(f_mid[1].revenue - f_mid[0].revenue) < 0.01);
    CHECK(std::abs(p_mid[1].revenue - p_mid[0].revenue) < 0.01);
}

TEST_CASE("filtered and embedded reserves rank differently when relevances vary") {
    GroupedLog grouped = group_log(generate_log(small_thin(200, 17)));
    ReplayOptions options;
    const double r = 0.2;
    RankingSpec filter = RankingSpec::standard_filter(r);
    RankingSpec proposed = RankingSpec::proposed(r);

    long differing = 0;
    for (const auto& auction : grouped.auctions) {
        Realisation real;
        real.slots = SlotCurve::geometric(auction.slot_count, options.slot_decay);
        for (std::size_t i = 0; i < auction.bids.size(); ++i) {
            Bidder b;
            b.id = static_cast<int>(i);
            b.value = auction.bids[i];
            b.relevance = auction.relevances[i];
            real.bidders.push_back(b);
        }
        Assignment zf = allocate(filter, auction.bids, real);
        Assignment zp = allocate(proposed, auction.bids, real);
        if (zf.order != zp.order) ++differing;
    }
    CHECK(differing > 0);
}

TEST_CASE("smoothness report on constructed curves") {
    std::vector<ReplayRow> rows;
    auto add = [&](const char* spec, double r, double revenue) {
        ReplayRow row;
        row.spec = spec;
        row.r = r;
        row.revenue = revenue;
        rows.push_back(row);
    };
    add("mono", 0.0, 1.0);
    add("mono", 0.1, 0.8);
    add("mono", 0.2, 0.5);
    add("flat", 0.0, 1.0);
    add("flat", 0.1, 1.0);
    add("wiggle", 0.0, 1.0);
    add("wiggle", 0.1, 0.4);
    add("wiggle", 0.2, 0.9);

    auto report = smoothness_report(rows);
    REQUIRE(report.size() == 3);
    std::map<std::string, SmoothnessRow> by_spec;
    for (const auto& row : report) by_spec[row.spec] = row;

    CHECK(by_spec["mono"].jaggedness == doctest::Approx(0.0));
    CHECK(by_spec["mono"].total_variation == doctest::Approx(0.5));
    CHECK(by_spec["flat"].jaggedness == doctest::Approx(0.0));
    CHECK(by_spec["wiggle"].total_variation == doctest::Approx(1.1));
    CHECK(by_spec["wiggle"].net_change == doctest::Approx(0.1));
    CHECK(by_spec["wiggle"].jaggedness == doctest::Approx(1.0));
}

TEST_CASE("replay sweep input validation") {
    GroupedLog empty;
    std::vector<ReplayRule> rules = {{RankFamily::Standard, false, 1.0}};
    CHECK_THROWS_AS(replay_sweep(empty, rules, {0.1}), InvalidInput);

    GroupedLog grouped = group_log(one_auction_log());
    CHECK_THROWS_AS(replay_sweep(grouped, {}, {0.1}), InvalidInput);
    CHECK_THROWS_AS(replay_sweep(grouped, rules, {}), InvalidInput);
    CHECK_THROWS_AS(replay_sweep(grouped, rules, {-0.1}), InvalidInput);
}
