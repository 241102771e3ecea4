#include "gsp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gsp/errors.hpp"

namespace gsp {

SlotCurve::SlotCurve(std::vector<double> effects) : effects_(std::move(effects)) {
    if (effects_.empty()) {
        throw InvalidInput("slot curve needs at least one slot");
    }
    double prev = std::numeric_limits<double>::infinity();
    for (double s : effects_) {
        if (!(s > 0.0)) {
            throw InvalidInput("slot effects must be positive");
        }
        if (!(s < prev)) {
            throw InvalidInput("slot effects must be strictly decreasing");
        }
        prev = s;
    }
}

SlotCurve SlotCurve::geometric(int count, double decay) {
    if (count < 1) {
        throw InvalidInput("slot count must be positive");
    }
    if (!(decay > 0.0 && decay < 1.0)) {
        throw InvalidInput("slot decay must lie in (0,1)");
    }
    std::vector<double> effects(static_cast<std::size_t>(count));
    double s = 1.0;
    for (int k = 0; k < count; ++k) {
        effects[static_cast<std::size_t>(k)] = s;
        s *= decay;
    }
    return SlotCurve(std::move(effects));
}

RankingSpec RankingSpec::by_bid(double rho) {
    RankingSpec spec;
    spec.family = RankFamily::ByBid;
    spec.reserve_score = rho;
    spec.validate();
    return spec;
}

RankingSpec RankingSpec::standard(double rho) {
    RankingSpec spec;
    spec.family = RankFamily::Standard;
    spec.reserve_score = rho;
    spec.validate();
    return spec;
}

RankingSpec RankingSpec::standard_filter(double r) {
    RankingSpec spec;
    spec.family = RankFamily::Standard;
    spec.reserve_price = r;
    spec.validate();
    return spec;
}

RankingSpec RankingSpec::squashed(double a, double rho) {
    RankingSpec spec;
    spec.family = RankFamily::Squashed;
    spec.alpha = a;
    spec.reserve_score = rho;
    spec.validate();
    return spec;
}

RankingSpec RankingSpec::squashed_filter(double a, double r) {
    RankingSpec spec;
    spec.family = RankFamily::Squashed;
    spec.alpha = a;
    spec.reserve_price = r;
    spec.validate();
    return spec;
}

RankingSpec RankingSpec::proposed(double r, double rho) {
    RankingSpec spec;
    spec.family = RankFamily::Proposed;
    spec.reserve_price = r;
    spec.reserve_score = rho;
    spec.validate();
    return spec;
}

RankingSpec RankingSpec::general(std::function<double(double)> g,
                                 std::function<double(double)> h, double rho) {
    RankingSpec spec;
    spec.family = RankFamily::GeneralGH;
    spec.general_g = std::move(g);
    spec.general_h = std::move(h);
    spec.reserve_score = rho;
    spec.validate();
    return spec;
}

bool RankingSpec::has_bid_filter() const {
    return reserve_price > 0.0 &&
           (family == RankFamily::Standard || family == RankFamily::Squashed);
}

double RankingSpec::g(double w) const {
    switch (family) {
        case RankFamily::ByBid:
            return 1.0;
        case RankFamily::Standard:
        case RankFamily::Proposed:
            return w;
        case RankFamily::Squashed:
            return std::pow(w, alpha);
        case RankFamily::GeneralGH:
            return general_g(w);
    }
    return 0.0;
}

double RankingSpec::h(double w) const {
    double base = 0.0;
    if (family == RankFamily::Proposed) {
        base = reserve_price * w;
    } else if (family == RankFamily::GeneralGH) {
        base = general_h(w);
    }
    return base + reserve_score;
}

std::string RankingSpec::label() const {
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
    if (has_bid_filter()) {
        base += "_r";
    }
    if (reserve_score > 0.0) {
        base += "_rho";
    }
    return base;
}

void RankingSpec::validate() const {
    if (!(reserve_price >= 0.0) || !std::isfinite(reserve_price)) {
        throw InvalidInput("reserve price must be finite and nonnegative");
    }
    if (!(reserve_score >= 0.0) || !std::isfinite(reserve_score)) {
        throw InvalidInput("reserve score must be finite and nonnegative");
    }
    if (family == RankFamily::Squashed && (!(alpha >= 0.0) || !std::isfinite(alpha))) {
        throw InvalidInput("squashing exponent must be finite and nonnegative");
    }
    if (has_bid_filter() && reserve_score > 0.0) {
        throw InvalidInput("bid filter and reserve score cannot be combined");
    }
    if (reserve_price > 0.0 &&
        (family == RankFamily::ByBid || family == RankFamily::GeneralGH)) {
        throw InvalidInput("reserve price is not supported for this family");
    }
    if (family == RankFamily::GeneralGH && (!general_g || !general_h)) {
        throw InvalidInput("general family needs both g and h");
    }
}

namespace {

void check_bid_and_relevance(double bid, double relevance) {
    if (!(bid >= 0.0) || !std::isfinite(bid)) {
        throw InvalidInput("bid must be finite and nonnegative");
    }
    if (!(relevance > 0.0 && relevance <= 1.0)) {
        throw InvalidInput("relevance must lie in (0,1]");
    }
}

}  // namespace

double score(const RankingSpec& spec, double bid, double relevance) {
    check_bid_and_relevance(bid, relevance);
    if (spec.has_bid_filter()) {
        if (bid < spec.reserve_price) {
            return 0.0;
        }
        return spec.g(relevance) * bid;
    }
    double raw = spec.g(relevance) * bid - spec.h(relevance);
    return raw > 0.0 ? raw : 0.0;
}

double gsp_price(const RankingSpec& spec, double next_score, double own_relevance) {
    if (!(next_score >= 0.0) || !std::isfinite(next_score)) {
        throw InvalidInput("next score must be finite and nonnegative");
    }
    if (!(own_relevance > 0.0 && own_relevance <= 1.0)) {
        throw InvalidInput("relevance must lie in (0,1]");
    }
    double slope = spec.g(own_relevance);
    if (!(slope > 0.0)) {
        throw DegenerateRanking("zero score slope at this relevance");
    }
    if (spec.has_bid_filter()) {
        return std::max(spec.reserve_price, next_score / slope);
    }
    return (next_score + spec.h(own_relevance)) / slope;
}

Assignment allocate(const RankingSpec& spec, const std::vector<double>& bids,
                    const Realisation& real) {
    spec.validate();
    const int n = real.size();
    if (static_cast<int>(bids.size()) != n) {
        throw InvalidInput("bid vector size must match bidder count");
    }

    Assignment out;
    out.allocations.assign(static_cast<std::size_t>(n), 0.0);
    out.prices.assign(static_cast<std::size_t>(n), 0.0);
    out.scores.assign(static_cast<std::size_t>(n), 0.0);

    for (int i = 0; i < n; ++i) {
        const Bidder& b = real.bidders[static_cast<std::size_t>(i)];
        if (!(b.value >= 0.0) || !std::isfinite(b.value)) {
            throw InvalidInput("bidder value must be finite and nonnegative");
        }
        out.scores[static_cast<std::size_t>(i)] =
            score(spec, bids[static_cast<std::size_t>(i)], b.relevance);
    }

    std::vector<int> ranked;
    ranked.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (out.scores[static_cast<std::size_t>(i)] > 0.0) {
            ranked.push_back(i);
        }
    }
    std::sort(ranked.begin(), ranked.end(), [&](int a, int b) {
        double sa = out.scores[static_cast<std::size_t>(a)];
        double sb = out.scores[static_cast<std::size_t>(b)];
        if (sa != sb) {
            return sa > sb;
        }
        return a < b;  // deterministic tie-break: lower bidder id wins
    });

    const int m = real.slots.size();
    const int k = static_cast<int>(ranked.size());
    out.slotted = std::min(m, k);
    for (int pos = 0; pos < out.slotted; ++pos) {
        int who = ranked[static_cast<std::size_t>(pos)];
        double next_score =
            (pos + 1 < k) ? out.scores[static_cast<std::size_t>(ranked[static_cast<std::size_t>(pos + 1)])] : 0.0;
        out.allocations[static_cast<std::size_t>(who)] = real.slots.effect(pos);
        out.prices[static_cast<std::size_t>(who)] =
            gsp_price(spec, next_score, real.bidders[static_cast<std::size_t>(who)].relevance);
    }
    out.order = std::move(ranked);
    return out;
}

}  // namespace gsp
