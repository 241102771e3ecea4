#include "gsp/revenue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsp/errors.hpp"

namespace gsp {

MetricBundle metrics(const Realisation& real, const Assignment& asg,
                     const ValueDistribution* dist) {
    const int n = real.size();
    if (static_cast<int>(asg.allocations.size()) != n ||
        static_cast<int>(asg.prices.size()) != n) {
        throw InvalidInput("assignment does not match the realisation");
    }
    MetricBundle out;
    out.virtual_surplus = dist ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < n; ++i) {
        const Bidder& b = real.bidders[static_cast<std::size_t>(i)];
        double x = asg.allocations[static_cast<std::size_t>(i)];
        if (x == 0.0) {
            continue;
        }
        double wx = b.relevance * x;
        out.revenue += asg.prices[static_cast<std::size_t>(i)] * wx;
        out.welfare += b.value * wx;
        out.click_yield += wx;
        if (dist) {
            out.virtual_surplus += virtual_value(*dist, b.value) * wx;
        }
    }
    return out;
}

double bne_revenue_bound(const Realisation& real, const RankingSpec& spec,
                         const ValueDistribution& dist) {
    if (!dist.mhr()) {
        throw BoundUnavailable("revenue bound needs a monotone hazard rate; " +
                               dist.describe() + " lacks one");
    }
    std::vector<double> truthful(static_cast<std::size_t>(real.size()));
    for (int i = 0; i < real.size(); ++i) {
        truthful[static_cast<std::size_t>(i)] = real.bidders[static_cast<std::size_t>(i)].value;
    }
    Assignment asg = allocate(spec, truthful, real);
    return metrics(real, asg, &dist).virtual_surplus;
}

bool swap_improves(const ValueDistribution& dist, double theta_i, double w_i,
                   double x_i, double theta_j, double w_j, double x_j) {
    double left = virtual_value(dist, theta_i) * w_i;
    double right = virtual_value(dist, theta_j) * w_j;
    return left > right && x_i < x_j;
}

SwapTrace transform_by_swaps(const ValueDistribution& dist, const Realisation& real,
                             double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw InvalidInput("reserve price must be finite and nonnegative");
    }

    // Qualification must agree between the two rules on this realisation.
    std::vector<int> z_qual, y_qual;
    for (int i = 0; i < real.size(); ++i) {
        const Bidder& b = real.bidders[static_cast<std::size_t>(i)];
        if (b.value >= r && b.value * b.relevance > 0.0) {
            z_qual.push_back(i);
        }
        if ((b.value - r) * b.relevance > 0.0) {
            y_qual.push_back(i);
        }
    }
    if (z_qual != y_qual) {
        throw PreconditionViolated("rules disagree on qualifying bidders");
    }

    const int k = static_cast<int>(z_qual.size());
    const int m = real.slots.size();
    auto z_key = [&](int i) {
        const Bidder& b = real.bidders[static_cast<std::size_t>(i)];
        return b.value * b.relevance;
    };
    auto y_key = [&](int i) {
        const Bidder& b = real.bidders[static_cast<std::size_t>(i)];
        return (b.value - r) * b.relevance;
    };
    auto by_key = [&](auto key) {
        return [key](int a, int b) {
            double ka = key(a), kb = key(b);
            if (ka != kb) {
                return ka > kb;
            }
            return a < b;
        };
    };

    std::vector<int> z_order = z_qual;
    std::sort(z_order.begin(), z_order.end(), by_key(z_key));
    std::vector<int> y_order = z_qual;
    std::sort(y_order.begin(), y_order.end(), by_key(y_key));

    std::vector<int> y_rank(static_cast<std::size_t>(real.size()), 0);
    for (int pos = 0; pos < k; ++pos) {
        y_rank[static_cast<std::size_t>(y_order[static_cast<std::size_t>(pos)])] = pos;
    }

    SwapTrace trace;
    trace.start_order = z_order;
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
            int ra = y_rank[static_cast<std::size_t>(z_order[static_cast<std::size_t>(a)])];
            int rb = y_rank[static_cast<std::size_t>(z_order[static_cast<std::size_t>(b)])];
            if (ra > rb) {
                trace.inversion_set.emplace_back(ra, rb);
            }
        }
    }

    auto effect_at = [&](int pos) { return pos < m ? real.slots.effect(pos) : 0.0; };
    auto phiw = [&](int i) {
        const Bidder& b = real.bidders[static_cast<std::size_t>(i)];
        return virtual_value(dist, b.value) * b.relevance;
    };
    auto surplus_of = [&](const std::vector<int>& order) {
        double total = 0.0;
        for (int pos = 0; pos < k; ++pos) {
            total += phiw(order[static_cast<std::size_t>(pos)]) * effect_at(pos);
        }
        return total;
    };

    trace.start_virtual_surplus = surplus_of(z_order);

    // Bubble toward the y ranking; each adjacent swap of an out-of-order pair
    // resolves exactly one inversion.
    std::vector<int> order = z_order;
    bool moved = true;
    while (moved) {
        moved = false;
        for (int pos = 0; pos + 1 < k; ++pos) {
            int left = order[static_cast<std::size_t>(pos)];
            int right = order[static_cast<std::size_t>(pos + 1)];
            if (y_rank[static_cast<std::size_t>(left)] > y_rank[static_cast<std::size_t>(right)]) {
                SwapStep step;
                step.position = pos;
                step.raised_bidder = right;
                step.lowered_bidder = left;
                step.delta = (phiw(right) - phiw(left)) * (effect_at(pos) - effect_at(pos + 1));
                trace.steps.push_back(step);
                std::swap(order[static_cast<std::size_t>(pos)],
                          order[static_cast<std::size_t>(pos + 1)]);
                moved = true;
            }
        }
    }

    trace.final_order = order;
    trace.final_virtual_surplus = surplus_of(order);
    return trace;
}

bool pairwise_inversion_improves(const ValueDistribution& dist, double r,
                                 double theta_i, double theta_j, double w_i,
                                 double w_j) {
    if (!(theta_i > theta_j) || !(theta_j >= r)) {
        throw PreconditionViolated("pair must satisfy theta_i > theta_j >= r");
    }
    bool y_puts_i_first = (theta_i - r) * w_i > (theta_j - r) * w_j;
    bool z_puts_i_first = theta_i * w_i > theta_j * w_j;
    if (!y_puts_i_first || z_puts_i_first) {
        return true;  // no disagreement to justify
    }
    double phi_i = virtual_value(dist, theta_i);
    double phi_j = virtual_value(dist, theta_j);
    if (phi_i == phi_j) {
        return true;  // degenerate pair, nothing to rank
    }
    return phi_i * w_i > phi_j * w_j;
}

}  // namespace gsp
