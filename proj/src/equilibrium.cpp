#include "gsp/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "gsp/errors.hpp"

namespace gsp {

namespace {

// Bidders ranked by truthful score, qualifying only, score descending with
// the same id tie-break allocate() uses.
std::vector<int> truthful_order(const RankingSpec& spec, const Realisation& real,
                                std::vector<double>& scores_out) {
    const int n = real.size();
    scores_out.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<int> ranked;
    for (int i = 0; i < n; ++i) {
        const Bidder& b = real.bidders[static_cast<std::size_t>(i)];
        double s = score(spec, b.value, b.relevance);
        scores_out[static_cast<std::size_t>(i)] = s;
        if (s > 0.0) {
            ranked.push_back(i);
        }
    }
    std::sort(ranked.begin(), ranked.end(), [&](int a, int b) {
        double sa = scores_out[static_cast<std::size_t>(a)];
        double sb = scores_out[static_cast<std::size_t>(b)];
        if (sa != sb) {
            return sa > sb;
        }
        return a < b;
    });
    return ranked;
}

}  // namespace

SneProfile lowest_sne_bids(const RankingSpec& spec, const Realisation& real) {
    spec.validate();
    if (!spec.in_class_e4()) {
        throw UnsupportedRanking("lowest equilibrium needs an in-class score rule");
    }

    const int n = real.size();
    const int m = real.slots.size();
    std::vector<double> truthful_scores;
    std::vector<int> ranked = truthful_order(spec, real, truthful_scores);
    const int k = static_cast<int>(ranked.size());

    SneProfile profile;
    profile.bids.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        profile.bids[static_cast<std::size_t>(i)] =
            real.bidders[static_cast<std::size_t>(i)].value;
    }

    // Positions 1..min(k-1, m): the bid makes the slot above indifferent.
    // The target score at position pos solves
    //   y(b_pos) * x_{pos-1} = sum_{j >= pos} y(theta_j) (x_{j-1} - x_j)
    // accumulated from the bottom. Deeper positions bid truthfully.
    const int last_recursive = std::min(k - 1, m);
    double acc = 0.0;
    std::vector<double> target(static_cast<std::size_t>(std::max(0, last_recursive + 1)), 0.0);
    for (int pos = k - 1; pos >= 1; --pos) {
        double x_here = pos < m ? real.slots.effect(pos) : 0.0;
        double x_above = (pos - 1) < m ? real.slots.effect(pos - 1) : 0.0;
        acc += truthful_scores[static_cast<std::size_t>(ranked[static_cast<std::size_t>(pos)])] *
               (x_above - x_here);
        if (pos <= last_recursive) {
            target[static_cast<std::size_t>(pos)] = acc / x_above;
        }
    }
    for (int pos = 1; pos <= last_recursive; ++pos) {
        int who = ranked[static_cast<std::size_t>(pos)];
        double w = real.bidders[static_cast<std::size_t>(who)].relevance;
        double slope = spec.g(w);
        if (!(slope > 0.0)) {
            throw DegenerateRanking("zero score slope at this relevance");
        }
        profile.bids[static_cast<std::size_t>(who)] =
            (target[static_cast<std::size_t>(pos)] + spec.h(w)) / slope;
    }

    profile.assignment = allocate(spec, profile.bids, real);
    profile.is_lowest = true;
    return profile;
}

std::vector<double> myerson_payments(const RankingSpec& spec, const Realisation& real) {
    spec.validate();
    if (!spec.in_class_e4()) {
        throw UnsupportedRanking("exact payments need an in-class score rule");
    }

    const int n = real.size();
    const int m = real.slots.size();
    std::vector<double> truthful_scores;
    std::vector<int> ranked = truthful_order(spec, real, truthful_scores);

    std::vector<double> pay(static_cast<std::size_t>(n), 0.0);
    for (int pos = 0; pos < std::min(m, static_cast<int>(ranked.size())); ++pos) {
        int i = ranked[static_cast<std::size_t>(pos)];
        const Bidder& bd = real.bidders[static_cast<std::size_t>(i)];
        double slope = spec.g(bd.relevance);
        if (!(slope > 0.0)) {
            throw DegenerateRanking("zero score slope at this relevance");
        }
        double offset = spec.h(bd.relevance);

        // Competitor scores that a rising bid can overtake, ascending.
        std::vector<double> others;
        others.reserve(static_cast<std::size_t>(n - 1));
        for (int j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            double s = truthful_scores[static_cast<std::size_t>(j)];
            if (s > 0.0) {
                others.push_back(s);
            }
        }
        std::sort(others.begin(), others.end());

        // Integrate the allocation-by-bid step function from 0 to theta_i.
        // Below t0 the score is zero; each crossed competitor score lifts the
        // position by one.
        double t0 = offset / slope;
        double integral = 0.0;
        double cur = t0;
        int rank = static_cast<int>(others.size());  // competitors still ahead
        auto effect_at = [&](int rk) { return rk < m ? real.slots.effect(rk) : 0.0; };
        for (double s : others) {
            double t_cross = (s + offset) / slope;
            if (t_cross >= bd.value) {
                break;
            }
            if (t_cross > cur) {
                integral += effect_at(rank) * (t_cross - cur);
                cur = t_cross;
            }
            --rank;
        }
        if (bd.value > cur) {
            integral += effect_at(rank) * (bd.value - cur);
        }

        double x_i = real.slots.effect(pos);
        pay[static_cast<std::size_t>(i)] = bd.value - integral / x_i;
    }
    return pay;
}

SneVerdict verify_sne(const RankingSpec& spec, const std::vector<double>& bids,
                      const Realisation& real) {
    Assignment asg = allocate(spec, bids, real);
    const int n = real.size();
    const int m = real.slots.size();
    const int k = static_cast<int>(asg.order.size());

    // Price to sit at each position, before adjusting for own relevance:
    // the score ranked immediately below that position.
    const int reachable = std::min(m, k + 1);
    std::vector<double> below_score(static_cast<std::size_t>(reachable), 0.0);
    for (int pos = 0; pos < reachable; ++pos) {
        below_score[static_cast<std::size_t>(pos)] =
            (pos + 1 < k)
                ? asg.scores[static_cast<std::size_t>(asg.order[static_cast<std::size_t>(pos + 1)])]
                : 0.0;
    }

    SneVerdict verdict;
    for (int i = 0; i < n; ++i) {
        const Bidder& bd = real.bidders[static_cast<std::size_t>(i)];
        double u =
            (bd.value - asg.prices[static_cast<std::size_t>(i)]) * asg.allocations[static_cast<std::size_t>(i)];

        auto record = [&](int target_1based, double slack) {
            if (slack < -1e-9) {
                verdict.ok = false;
                verdict.violations.push_back(SneViolation{i, target_1based, slack});
            }
        };

        record(0, u);  // outside option
        for (int pos = 0; pos < reachable; ++pos) {
            double price =
                gsp_price(spec, below_score[static_cast<std::size_t>(pos)], bd.relevance);
            double deviation = (bd.value - price) * real.slots.effect(pos);
            record(pos + 1, u - deviation);
        }
    }
    return verdict;
}

FeasibilityInterval order_preserving_sne_feasible(const Realisation& real, double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw InvalidInput("reserve price must be finite and nonnegative");
    }
    std::vector<int> qualifying;
    for (int i = 0; i < real.size(); ++i) {
        const Bidder& b = real.bidders[static_cast<std::size_t>(i)];
        if (b.value >= r && b.value > 0.0) {
            qualifying.push_back(i);
        }
    }
    if (qualifying.size() != 2) {
        throw PreconditionViolated("probe needs exactly two qualifying bidders");
    }
    if (real.slots.size() < 1) {
        throw PreconditionViolated("probe needs at least one slot");
    }

    auto product = [&](int i) {
        const Bidder& b = real.bidders[static_cast<std::size_t>(i)];
        return b.value * b.relevance;
    };
    int top = qualifying[0], second = qualifying[1];
    if (product(second) > product(top)) {
        std::swap(top, second);
    }

    const Bidder& b1 = real.bidders[static_cast<std::size_t>(top)];
    const Bidder& b2 = real.bidders[static_cast<std::size_t>(second)];
    const double x1 = real.slots.effect(0);
    const double x2 = real.slots.size() >= 2 ? real.slots.effect(1) : 0.0;

    // Feasible band for the runner-up bid: the runner-up must not envy the
    // top slot at the price of their own bid, and the top bidder must not
    // envy the runner-up slot at the reserve.
    FeasibilityInterval out;
    out.lower = (b2.value * b2.relevance * (x1 - x2) + r * b2.relevance * x2) /
                (b2.relevance * x1);
    out.upper = (b1.value * b1.relevance * (x1 - x2) + r * b1.relevance * x2) /
                (b2.relevance * x1);
    out.feasible = out.lower <= out.upper;
    return out;
}

}  // namespace gsp
