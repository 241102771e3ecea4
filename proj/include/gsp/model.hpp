#pragma once

#include <functional>
#include <string>
#include <vector>

namespace gsp {

// One advertiser: private per-click value and click relevance.
struct Bidder {
    double value = 0.0;      // theta >= 0
    double relevance = 1.0;  // w in (0,1]
    int id = 0;
};

// Strictly decreasing positive slot click-through effects s_1 > ... > s_m.
class SlotCurve {
public:
    SlotCurve() = default;
    explicit SlotCurve(std::vector<double> effects);
    static SlotCurve geometric(int count, double decay);

    int size() const { return static_cast<int>(effects_.size()); }
    double effect(int k) const { return effects_[static_cast<std::size_t>(k)]; }
    const std::vector<double>& effects() const { return effects_; }

private:
    std::vector<double> effects_;
};

// A concrete auction instance: the bidders present and the slots for sale.
struct Realisation {
    std::vector<Bidder> bidders;
    SlotCurve slots;

    int size() const { return static_cast<int>(bidders.size()); }
};

enum class RankFamily { ByBid, Standard, Squashed, Proposed, GeneralGH };

// Ranking rule. All families except the reserve-price filter share the score
// shape (g(w) * b - h(w))+, which is what makes exact equilibrium analysis
// possible. The filter variant z(b,w) = 1{b >= r} * b * w^alpha falls outside
// that shape and is handled through dedicated branches.
struct RankingSpec {
    RankFamily family = RankFamily::Standard;
    double alpha = 1.0;          // squashing exponent, Squashed only
    double reserve_price = 0.0;  // r: in-score for Proposed, bid filter for Standard/Squashed
    double reserve_score = 0.0;  // rho: subtracted from the score before ranking
    std::function<double(double)> general_g;  // GeneralGH only
    std::function<double(double)> general_h;  // GeneralGH only

    static RankingSpec by_bid(double rho = 0.0);
    static RankingSpec standard(double rho = 0.0);
    static RankingSpec standard_filter(double r);
    static RankingSpec squashed(double a, double rho = 0.0);
    static RankingSpec squashed_filter(double a, double r);
    static RankingSpec proposed(double r, double rho = 0.0);
    static RankingSpec general(std::function<double(double)> g,
                               std::function<double(double)> h, double rho = 0.0);

    bool has_bid_filter() const;
    bool in_class_e4() const { return !has_bid_filter(); }

    // Score slope and offset: score = (g(w) * b - h(w))+ for in-class specs.
    double g(double w) const;
    double h(double w) const;

    std::string label() const;
    void validate() const;
};

// Result of running one auction: ranking order, per-bidder slot effects and
// per-click prices. Vectors are indexed by bidder position in the
// realisation; excluded bidders keep zero rows.
struct Assignment {
    std::vector<int> order;           // qualifying bidders, best score first
    std::vector<double> allocations;  // x_i, 0 when unslotted
    std::vector<double> prices;       // p_i, 0 when unslotted
    std::vector<double> scores;       // raw rank scores
    int slotted = 0;
};

// Rank score of a bid at the given relevance.
double score(const RankingSpec& spec, double bid, double relevance);

// Minimum per-click price that keeps a slot against the given next-ranked
// score. This is the GSP payment rule for every family.
double gsp_price(const RankingSpec& spec, double next_score, double own_relevance);

// Run the auction: rank qualifying bidders, assign slots in order, price each
// slotted bidder against the score ranked immediately below.
Assignment allocate(const RankingSpec& spec, const std::vector<double>& bids,
                    const Realisation& real);

}  // namespace gsp
