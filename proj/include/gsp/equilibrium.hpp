#pragma once

#include <vector>

#include "gsp/model.hpp"

namespace gsp {

// A bid profile together with the auction outcome it induces.
struct SneProfile {
    std::vector<double> bids;  // indexed by bidder
    Assignment assignment;
    bool is_lowest = false;
};

// Bids of the lowest symmetric Nash equilibrium under an in-class ranking
// rule. Bidders are ordered by truthful score; each slotted bidder's bid
// makes the bidder above exactly indifferent to swapping down, unslotted and
// excluded bidders bid truthfully. Throws UnsupportedRanking for rules
// outside the (g(w)b - h(w))+ class.
SneProfile lowest_sne_bids(const RankingSpec& spec, const Realisation& real);

// Per-click payments of the truthful-ranking incentive-compatible mechanism
// with the same allocation: p_i = theta_i - (1/x_i) * integral of the
// allocation bidder i earns bidding t, t from 0 to theta_i. Computed exactly
// from the score breakpoints. Unslotted bidders pay zero.
std::vector<double> myerson_payments(const RankingSpec& spec, const Realisation& real);

struct SneViolation {
    int bidder = 0;
    int target_position = 0;  // 1-based slot position, 0 = outside option
    double slack = 0.0;       // negative when the inequality fails
};

struct SneVerdict {
    bool ok = true;
    std::vector<SneViolation> violations;
};

// Check the symmetric-equilibrium inequalities for an arbitrary bid profile:
// no bidder may prefer another slot at that slot's implied price, nor prefer
// to drop out. Slack below -1e-9 is reported as a violation.
SneVerdict verify_sne(const RankingSpec& spec, const std::vector<double>& bids,
                      const Realisation& real);

struct FeasibilityInterval {
    bool feasible = false;
    double lower = 0.0;
    double upper = 0.0;
};

// Two-bidder probe for reserve-price-filtered standard ranking: the interval
// of second-place bids consistent with an equilibrium that preserves the
// score order. An empty interval (lower > upper) certifies that no
// order-preserving equilibrium exists.
FeasibilityInterval order_preserving_sne_feasible(const Realisation& real, double r);

}  // namespace gsp
