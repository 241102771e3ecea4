#include "gsp/replay.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "gsp/errors.hpp"
#include "gsp/parallel.hpp"
#include "gsp/rng.hpp"

namespace gsp {

namespace {

constexpr const char* kLogHeader = "auction_id,bidder_id,bid,relevance,slot_count";

void check_relevance_support(const ValueDistribution& dist) {
    if (dist.support_lower() < 0.0 || dist.support_upper() > 1.0) {
        throw InvalidInput("relevance distribution support must lie within [0,1]");
    }
}

}  // namespace

LogSpec LogSpec::thick() {
    LogSpec spec;
    spec.market = MarketKind::Thick;
    spec.auctions = 1000;
    spec.bidders = 500;
    spec.slots = SlotCurve::geometric(5, 0.5);
    return spec;
}

LogSpec LogSpec::thin() {
    LogSpec spec;
    spec.market = MarketKind::Thin;
    spec.auctions = 4000;
    spec.bidders = 6;
    spec.atoms = {{0.4, 0.3}};
    spec.slots = SlotCurve::geometric(3, 0.5);
    return spec;
}

void LogSpec::validate() const {
    if (auctions < 1) {
        throw InvalidInput("log needs at least one auction");
    }
    if (bidders < 1) {
        throw InvalidInput("log needs at least one bidder per auction");
    }
    if (market == MarketKind::Thin && bidders >= 10) {
        throw InvalidInput("thin market means fewer than 10 bidders per auction");
    }
    if (market == MarketKind::Thin && atoms.empty()) {
        throw InvalidInput("thin market needs at least one common-bid atom");
    }
    if (!(bid_lower >= 0.0) || !(bid_upper > bid_lower) || !std::isfinite(bid_upper)) {
        throw InvalidInput("bid range must satisfy 0 <= lower < upper");
    }
    double total_mass = 0.0;
    for (const BidAtom& atom : atoms) {
        if (!(atom.bid >= 0.0) || !std::isfinite(atom.bid)) {
            throw InvalidInput("atom bids must be finite and nonnegative");
        }
        if (!(atom.mass > 0.0)) {
            throw InvalidInput("atom masses must be positive");
        }
        total_mass += atom.mass;
    }
    if (total_mass > 1.0 + 1e-12) {
        throw InvalidInput("atom masses must sum to at most one");
    }
    check_relevance_support(relevance_dist);
    if (slots.size() < 1) {
        throw InvalidInput("log needs at least one slot");
    }
}

std::vector<LogRecord> generate_log(const LogSpec& spec) {
    spec.validate();
    const long n_records = spec.auctions * static_cast<long>(spec.bidders);
    std::vector<LogRecord> out(static_cast<std::size_t>(n_records));
    parallel_for(spec.auctions, [&](long a) {
        Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(a)));
        std::string auction_id = "a" + std::to_string(a);
        for (int i = 0; i < spec.bidders; ++i) {
            double u_component = rng.uniform();
            double u_bid = rng.uniform();
            double bid = spec.bid_lower + (spec.bid_upper - spec.bid_lower) * u_bid;
            double cumulative = 0.0;
            for (const BidAtom& atom : spec.atoms) {
                cumulative += atom.mass;
                if (u_component < cumulative) {
                    bid = atom.bid;
                    break;
                }
            }
            LogRecord& rec =
                out[static_cast<std::size_t>(a) * static_cast<std::size_t>(spec.bidders) +
                    static_cast<std::size_t>(i)];
            rec.auction_id = auction_id;
            rec.bidder_id = "b" + std::to_string(i);
            rec.bid = bid;
            rec.relevance = spec.relevance_dist.sample(rng);
            rec.slot_count = spec.slots.size();
        }
    });
    return out;
}

namespace {

bool parse_double_field(const std::string& field, double* out) {
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, *out);
    return ec == std::errc() && ptr == last && std::isfinite(*out);
}

bool parse_int_field(const std::string& field, int* out) {
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, *out);
    return ec == std::errc() && ptr == last;
}

bool parse_log_row(const std::string& line, LogRecord* rec) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (fields.size() != 5) {
        return false;
    }
    if (fields[0].empty() || fields[1].empty()) {
        return false;
    }
    if (!parse_double_field(fields[2], &rec->bid) ||
        !parse_double_field(fields[3], &rec->relevance) ||
        !parse_int_field(fields[4], &rec->slot_count)) {
        return false;
    }
    if (!(rec->bid >= 0.0)) {
        return false;
    }
    if (!(rec->relevance > 0.0 && rec->relevance <= 1.0)) {
        return false;
    }
    if (rec->slot_count < 1) {
        return false;
    }
    rec->auction_id = fields[0];
    rec->bidder_id = fields[1];
    return true;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

void format_double(std::string* out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    out->append(buf, ptr);
}

}  // namespace

LogReadResult read_log_csv(std::istream& in) {
    LogReadResult result;
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("log file is empty");
    }
    if (strip_cr(line) != kLogHeader) {
        throw ConfigError("log file header mismatch");
    }
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        LogRecord rec;
        if (parse_log_row(line, &rec)) {
            result.records.push_back(std::move(rec));
        } else {
            ++result.rejected;
        }
    }
    return result;
}

LogReadResult read_log_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open log file: " + path);
    }
    return read_log_csv(in);
}

void write_log_csv(std::ostream& out, const std::vector<LogRecord>& records) {
    out << kLogHeader << '\n';
    std::string line;
    for (const LogRecord& rec : records) {
        line.clear();
        line += rec.auction_id;
        line += ',';
        line += rec.bidder_id;
        line += ',';
        format_double(&line, rec.bid);
        line += ',';
        format_double(&line, rec.relevance);
        line += ',';
        line += std::to_string(rec.slot_count);
        line += '\n';
        out << line;
    }
}

void write_log_csv(const std::string& path, const std::vector<LogRecord>& records) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot open log file for writing: " + path);
    }
    write_log_csv(out, records);
}

GroupedLog group_log(const std::vector<LogRecord>& records) {
    GroupedLog out;
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(records.size() / 4 + 1);
    for (const LogRecord& rec : records) {
        if (!(rec.bid >= 0.0) || !std::isfinite(rec.bid) ||
            !(rec.relevance > 0.0 && rec.relevance <= 1.0) || rec.slot_count < 1 ||
            rec.auction_id.empty()) {
            ++out.rejected;
            continue;
        }
        auto [it, inserted] = index.try_emplace(rec.auction_id, out.auctions.size());
        if (inserted) {
            out.auctions.emplace_back();
            out.auctions.back().slot_count = rec.slot_count;
        }
        ReplayAuction& auction = out.auctions[it->second];
        if (rec.slot_count != auction.slot_count) {
            ++out.rejected;
            continue;
        }
        auction.bids.push_back(rec.bid);
        auction.relevances.push_back(rec.relevance);
    }
    return out;
}

RankingSpec ReplayRule::make(double r) const {
    validate();
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw InvalidInput("reserve grid values must be finite and nonnegative");
    }
    switch (family) {
        case RankFamily::ByBid:
            return RankingSpec::by_bid(r);
        case RankFamily::Standard:
            return bid_filter && r > 0.0 ? RankingSpec::standard_filter(r)
                                         : RankingSpec::standard(r);
        case RankFamily::Squashed:
            return bid_filter && r > 0.0 ? RankingSpec::squashed_filter(alpha, r)
                                         : RankingSpec::squashed(alpha, r);
        case RankFamily::Proposed:
            return RankingSpec::proposed(r);
        case RankFamily::GeneralGH:
            break;
    }
    throw UnsupportedRanking("general ranking rules have no replay parameterisation");
}

std::string ReplayRule::label() const {
    std::string base;
    switch (family) {
        case RankFamily::ByBid:
            base = "by_bid";
            break;
        case RankFamily::Standard:
            base = "standard";
            break;
        case RankFamily::Squashed:
            base = "squashed";
            break;
        case RankFamily::Proposed:
            base = "proposed";
            break;
        case RankFamily::GeneralGH:
            base = "general";
            break;
    }
    if (bid_filter) {
        base += "_filter";
    }
    if (family == RankFamily::Squashed) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "_a%g", alpha);
        base += buf;
    }
    return base;
}

void ReplayRule::validate() const {
    if (family == RankFamily::GeneralGH) {
        throw UnsupportedRanking("general ranking rules have no replay parameterisation");
    }
    if (bid_filter && family != RankFamily::Standard && family != RankFamily::Squashed) {
        throw InvalidInput("bid filter applies to the standard and squashed families only");
    }
    if (family == RankFamily::Squashed && (!(alpha >= 0.0) || !std::isfinite(alpha))) {
        throw InvalidInput("squashing exponent must be finite and nonnegative");
    }
}

std::vector<ReplayRow> replay_sweep(const GroupedLog& log,
                                    const std::vector<ReplayRule>& rules,
                                    const std::vector<double>& r_grid,
                                    const ReplayOptions& options) {
    if (log.auctions.empty()) {
        throw InvalidInput("replay needs a non-empty log");
    }
    if (rules.empty() || r_grid.empty()) {
        throw InvalidInput("replay needs at least one rule and one reserve value");
    }
    for (const ReplayRule& rule : rules) {
        rule.validate();
    }
    if (!(options.min_bid >= 0.0) || !std::isfinite(options.min_bid)) {
        throw InvalidInput("minimum bid must be finite and nonnegative");
    }

    // Shared slot curves, one per distinct slot count in the log.
    std::map<int, SlotCurve> curves;
    for (const ReplayAuction& auction : log.auctions) {
        if (!curves.count(auction.slot_count)) {
            curves.emplace(auction.slot_count,
                           SlotCurve::geometric(auction.slot_count, options.slot_decay));
        }
    }

    struct Prepared {
        Realisation real;
        std::vector<double> bids;
    };
    std::vector<Prepared> prepared(log.auctions.size());
    for (std::size_t a = 0; a < log.auctions.size(); ++a) {
        const ReplayAuction& auction = log.auctions[a];
        Prepared& prep = prepared[a];
        prep.real.slots = curves.at(auction.slot_count);
        for (std::size_t i = 0; i < auction.bids.size(); ++i) {
            if (auction.bids[i] < options.min_bid) {
                continue;
            }
            Bidder bidder;
            bidder.value = auction.bids[i];
            bidder.relevance = auction.relevances[i];
            bidder.id = static_cast<int>(prep.bids.size());
            prep.real.bidders.push_back(bidder);
            prep.bids.push_back(auction.bids[i]);
        }
    }

    const long cells = static_cast<long>(rules.size()) * static_cast<long>(r_grid.size());
    std::vector<ReplayRow> rows(static_cast<std::size_t>(cells));
    parallel_for(cells, [&](long cell) {
        const ReplayRule& rule = rules[static_cast<std::size_t>(cell) / r_grid.size()];
        double r = r_grid[static_cast<std::size_t>(cell) % r_grid.size()];
        RankingSpec spec = rule.make(r);
        double revenue = 0.0;
        double clicks = 0.0;
        for (const Prepared& prep : prepared) {
            Assignment asg = allocate(spec, prep.bids, prep.real);
            for (std::size_t i = 0; i < prep.bids.size(); ++i) {
                double x = asg.allocations[i];
                if (x <= 0.0) {
                    continue;
                }
                double w = prep.real.bidders[i].relevance;
                revenue += asg.prices[i] * w * x;
                clicks += w * x;
            }
        }
        ReplayRow& row = rows[static_cast<std::size_t>(cell)];
        row.spec = rule.label();
        row.r = r;
        if (rule.family == RankFamily::Squashed) {
            row.alpha = rule.alpha;
        }
        if (spec.reserve_score > 0.0) {
            row.rho = spec.reserve_score;
        }
        row.revenue = revenue;
        row.click_yield = clicks;
        row.auctions = static_cast<long>(prepared.size());
    });
    return rows;
}

std::vector<SmoothnessRow> smoothness_report(const std::vector<ReplayRow>& rows) {
    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<std::pair<double, double>>> curves;
    for (const ReplayRow& row : rows) {
        auto [it, inserted] = curves.try_emplace(row.spec);
        if (inserted) {
            order.push_back(row.spec);
        }
        it->second.emplace_back(row.r, row.revenue);
    }
    std::vector<SmoothnessRow> out;
    out.reserve(order.size());
    for (const std::string& spec : order) {
        std::vector<std::pair<double, double>>& curve = curves[spec];
        std::stable_sort(curve.begin(), curve.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        SmoothnessRow row;
        row.spec = spec;
        for (std::size_t k = 1; k < curve.size(); ++k) {
            row.total_variation += std::abs(curve[k].second - curve[k - 1].second);
        }
        if (!curve.empty()) {
            row.net_change = std::abs(curve.back().second - curve.front().second);
        }
        row.jaggedness = row.total_variation - row.net_change;
        out.push_back(row);
    }
    return out;
}

}  // namespace gsp
