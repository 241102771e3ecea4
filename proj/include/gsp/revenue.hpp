#pragma once

#include <utility>
#include <vector>

#include "gsp/equilibrium.hpp"
#include "gsp/model.hpp"
#include "gsp/valuedist.hpp"

namespace gsp {

// Headline quantities of one auction outcome.
struct MetricBundle {
    double revenue = 0.0;         // sum of p_i * w_i * x_i
    double welfare = 0.0;         // sum of theta_i * w_i * x_i
    double click_yield = 0.0;     // sum of w_i * x_i
    double virtual_surplus = 0.0; // sum of phi(theta_i) * w_i * x_i, NaN without a dist
};

// Aggregate an assignment. The distribution is only needed for the virtual
// surplus; pass nullptr to skip it.
MetricBundle metrics(const Realisation& real, const Assignment& asg,
                     const ValueDistribution* dist = nullptr);

// Upper bound on equilibrium revenue: expected virtual surplus of the
// truthful-bid assignment under the given spec. Requires a monotone-hazard
// distribution; throws BoundUnavailable otherwise.
double bne_revenue_bound(const Realisation& real, const RankingSpec& spec,
                         const ValueDistribution& dist);

// True when swapping bidders i and j raises the virtual surplus: bidder i
// has the larger virtual-value-weighted relevance but the smaller allocation.
bool swap_improves(const ValueDistribution& dist, double theta_i, double w_i,
                   double x_i, double theta_j, double w_j, double x_j);

struct SwapStep {
    int position = 0;       // left index of the adjacent pair swapped
    int raised_bidder = 0;  // bidder moving up
    int lowered_bidder = 0; // bidder moving down
    double delta = 0.0;     // change in virtual surplus
};

// Trace of adjacent transpositions that turn the filtered-standard ranking
// into the reserve-in-score ranking, one resolved inversion per step.
struct SwapTrace {
    std::vector<std::pair<int, int>> inversion_set;  // rank pairs out of order
    std::vector<SwapStep> steps;
    std::vector<int> start_order;  // bidders, filtered-standard ranking
    std::vector<int> final_order;  // bidders after all swaps
    double start_virtual_surplus = 0.0;
    double final_virtual_surplus = 0.0;
};

// Decompose the ranking disagreement between standard-with-filter z and the
// reserve-in-score rule y (same reserve r) into adjacent swaps, recording the
// virtual-surplus change of each. Both rules must agree on which bidders
// qualify; otherwise PreconditionViolated is thrown.
SwapTrace transform_by_swaps(const ValueDistribution& dist, const Realisation& real,
                             double r);

// Pairwise order-consistency check behind the dominance argument: whenever
// the reserve-in-score rule ranks the higher-value bidder of a pair above
// while the filtered product rule ranks them below, the swap must raise the
// virtual surplus. Requires theta_i > theta_j >= r.
bool pairwise_inversion_improves(const ValueDistribution& dist, double r,
                                 double theta_i, double theta_j, double w_i,
                                 double w_j);

}  // namespace gsp
