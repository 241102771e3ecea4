#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "gsp/model.hpp"
#include "gsp/valuedist.hpp"

namespace gsp {

// One log row: an advertiser's standing bid in one auction.
struct LogRecord {
    std::string auction_id;
    std::string bidder_id;
    double bid = 0.0;
    double relevance = 1.0;
    int slot_count = 1;
};

enum class MarketKind { Thick, Thin };

// Point mass in the bid mixture, a common bid shared by many advertisers.
struct BidAtom {
    double bid = 0.0;
    double mass = 0.0;
};

// Synthetic log generator parameters. Bids are drawn from a mixture of the
// listed atoms and a uniform continuous component on [bid_lower, bid_upper].
struct LogSpec {
    MarketKind market = MarketKind::Thick;
    long auctions = 1000;
    int bidders = 500;
    std::vector<BidAtom> atoms;
    double bid_lower = 0.05;
    double bid_upper = 1.0;
    ValueDistribution relevance_dist = ValueDistribution::uniform(0.5, 1.0);
    SlotCurve slots = SlotCurve::geometric(5, 0.5);
    std::uint64_t seed = 1;

    static LogSpec thick();
    static LogSpec thin();
    void validate() const;
};

// Draw a full synthetic log; deterministic given the seed.
std::vector<LogRecord> generate_log(const LogSpec& spec);

struct LogReadResult {
    std::vector<LogRecord> records;
    long rejected = 0;  // rows dropped for bad shape or invariant breaks
};

LogReadResult read_log_csv(std::istream& in);
LogReadResult read_log_csv(const std::string& path);
void write_log_csv(std::ostream& out, const std::vector<LogRecord>& records);
void write_log_csv(const std::string& path, const std::vector<LogRecord>& records);

// One auction's fixed logged bids, grouped and invariant-checked.
struct ReplayAuction {
    std::vector<double> bids;
    std::vector<double> relevances;
    int slot_count = 1;
};

struct GroupedLog {
    std::vector<ReplayAuction> auctions;  // first-appearance order
    long rejected = 0;                    // records dropped while grouping
};

GroupedLog group_log(const std::vector<LogRecord>& records);

// A ranking family swept over the reserve grid. The grid value lands in the
// family's own reserve knob: the bid filter for filtered rules, the in-score
// reserve for the proposed rule, the score offset otherwise.
struct ReplayRule {
    RankFamily family = RankFamily::Standard;
    bool bid_filter = false;
    double alpha = 1.0;  // Squashed only

    RankingSpec make(double r) const;
    std::string label() const;
    void validate() const;
};

struct ReplayOptions {
    double min_bid = 0.0;    // bids below this are dropped from every auction
    double slot_decay = 0.5; // slot curves are rebuilt as geometric(count, decay)
};

struct ReplayRow {
    std::string spec;
    double r = std::numeric_limits<double>::quiet_NaN();
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double rho = std::numeric_limits<double>::quiet_NaN();
    double revenue = 0.0;
    double click_yield = 0.0;
    long auctions = 0;
};

// Replay every auction under every (rule, reserve) pair, bids held fixed.
// Revenue accumulates price * relevance * slot effect; click yield
// accumulates relevance * slot effect.
std::vector<ReplayRow> replay_sweep(const GroupedLog& log,
                                    const std::vector<ReplayRule>& rules,
                                    const std::vector<double>& r_grid,
                                    const ReplayOptions& options = {});

struct SmoothnessRow {
    std::string spec;
    double total_variation = 0.0;
    double net_change = 0.0;
    double jaggedness = 0.0;  // total variation minus |net change|
};

// Per-spec jaggedness of the revenue curve over the reserve grid.
std::vector<SmoothnessRow> smoothness_report(const std::vector<ReplayRow>& rows);

}  // namespace gsp
