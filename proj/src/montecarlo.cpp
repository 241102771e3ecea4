#include "gsp/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "gsp/equilibrium.hpp"
#include "gsp/errors.hpp"
#include "gsp/parallel.hpp"
#include "gsp/rng.hpp"

namespace gsp {

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    const std::size_t n = xs.size();
    if (n == 0) {
        return out;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    out.mean = sum / static_cast<double>(n);
    if (n == 1) {
        return out;
    }
    double ss = 0.0;
    for (double x : xs) {
        double d = x - out.mean;
        ss += d * d;
    }
    double var = ss / static_cast<double>(n - 1);
    out.se = std::sqrt(var / static_cast<double>(n));
    return out;
}

void ExperimentConfig::validate() const {
    population.validate_for_auction();
    if (bidders < 1) {
        throw ConfigError("experiment needs at least one bidder");
    }
    if (trials < 1) {
        throw ConfigError("experiment needs at least one trial");
    }
    if (slots.size() < 1) {
        throw ConfigError("experiment needs at least one slot");
    }
    if (grid.empty()) {
        throw ConfigError("experiment needs at least one spec point");
    }
    for (const SpecPoint& point : grid) {
        point.spec.validate();
        if (!point.spec.in_class_e4()) {
            if (mode == SweepMode::LowestSne) {
                throw ConfigError("spec '" + point.spec.label() +
                                  "' has no equilibrium path; use the bound mode");
            }
            if (!population.value_dist.mhr()) {
                throw ConfigError("bound mode needs a monotone hazard rate; " +
                                  population.value_dist.describe() + " lacks one");
            }
        }
    }
}

std::vector<Realisation> sample_realisations(const PopulationModel& population,
                                             int bidders, const SlotCurve& slots,
                                             long trials, std::uint64_t seed) {
    std::vector<Realisation> out(static_cast<std::size_t>(trials));
    parallel_for(trials, [&](long t) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        Realisation& real = out[static_cast<std::size_t>(t)];
        real.bidders = sample_population(population, bidders, rng);
        real.slots = slots;
    });
    return out;
}

namespace {

MetricBundle evaluate_point(const SpecPoint& point, const Realisation& real,
                            const ValueDistribution& value_dist) {
    if (point.spec.in_class_e4()) {
        SneProfile profile = lowest_sne_bids(point.spec, real);
        return metrics(real, profile.assignment);
    }
    // Filtered specs: truthful assignment, revenue taken as virtual surplus.
    std::vector<double> truthful(static_cast<std::size_t>(real.size()));
    for (int i = 0; i < real.size(); ++i) {
        truthful[static_cast<std::size_t>(i)] = real.bidders[static_cast<std::size_t>(i)].value;
    }
    Assignment asg = allocate(point.spec, truthful, real);
    MetricBundle bundle = metrics(real, asg, &value_dist);
    bundle.revenue = bundle.virtual_surplus;
    return bundle;
}

}  // namespace

std::vector<OperatingPoint> run_sweep(const ExperimentConfig& config) {
    config.validate();
    std::vector<Realisation> stream = sample_realisations(
        config.population, config.bidders, config.slots, config.trials, config.seed);

    std::vector<OperatingPoint> out;
    out.reserve(config.grid.size());
    std::vector<double> revenue(static_cast<std::size_t>(config.trials));
    std::vector<double> welfare(static_cast<std::size_t>(config.trials));
    std::vector<double> clicks(static_cast<std::size_t>(config.trials));
    for (const SpecPoint& point : config.grid) {
        parallel_for(config.trials, [&](long t) {
            MetricBundle bundle = evaluate_point(point, stream[static_cast<std::size_t>(t)],
                                                 config.population.value_dist);
            revenue[static_cast<std::size_t>(t)] = bundle.revenue;
            welfare[static_cast<std::size_t>(t)] = bundle.welfare;
            clicks[static_cast<std::size_t>(t)] = bundle.click_yield;
        });
        OperatingPoint op;
        op.family = point.family;
        op.r = point.r;
        op.alpha = point.alpha;
        op.rho = point.rho;
        MeanSe rev = mean_se(revenue), wel = mean_se(welfare), clk = mean_se(clicks);
        op.revenue = rev.mean;
        op.revenue_se = rev.se;
        op.welfare = wel.mean;
        op.welfare_se = wel.se;
        op.clicks = clk.mean;
        op.clicks_se = clk.se;
        op.trials = config.trials;
        out.push_back(op);
    }
    return out;
}

std::vector<OperatingPoint> frontier(const std::vector<OperatingPoint>& points,
                                     FrontierX x_metric) {
    auto x_of = [&](const OperatingPoint& p) {
        return x_metric == FrontierX::Welfare ? p.welfare : p.clicks;
    };
    std::vector<OperatingPoint> kept;
    for (const OperatingPoint& p : points) {
        bool dominated = false;
        for (const OperatingPoint& q : points) {
            if (q.revenue >= p.revenue && x_of(q) >= x_of(p) &&
                (q.revenue > p.revenue || x_of(q) > x_of(p))) {
                dominated = true;
                break;
            }
        }
        if (!dominated) {
            kept.push_back(p);
        }
    }
    std::sort(kept.begin(), kept.end(), [&](const OperatingPoint& a, const OperatingPoint& b) {
        if (x_of(a) != x_of(b)) {
            return x_of(a) < x_of(b);
        }
        if (a.revenue != b.revenue) {
            return a.revenue < b.revenue;
        }
        return a.family < b.family;
    });
    return kept;
}

DominanceResult dominance_experiment(const PopulationModel& population,
                                     const SlotCurve& slots, int bidders, double r,
                                     long trials, std::uint64_t seed) {
    population.validate_for_auction();
    if (!population.value_dist.mhr()) {
        throw BoundUnavailable("dominance comparison needs a monotone hazard rate");
    }
    if (!(r > 0.0)) {
        throw InvalidInput("dominance comparison needs a positive reserve");
    }

    const RankingSpec y_spec = RankingSpec::proposed(r);
    const RankingSpec z_spec = RankingSpec::standard_filter(r);
    const ValueDistribution& dist = population.value_dist;

    std::vector<Realisation> stream =
        sample_realisations(population, bidders, slots, trials, seed);

    std::vector<double> rev_y(static_cast<std::size_t>(trials));
    std::vector<double> vs_y(static_cast<std::size_t>(trials));
    std::vector<double> vs_z(static_cast<std::size_t>(trials));
    parallel_for(trials, [&](long t) {
        const Realisation& real = stream[static_cast<std::size_t>(t)];
        SneProfile profile = lowest_sne_bids(y_spec, real);
        MetricBundle y_bundle = metrics(real, profile.assignment, &dist);
        rev_y[static_cast<std::size_t>(t)] = y_bundle.revenue;
        vs_y[static_cast<std::size_t>(t)] = y_bundle.virtual_surplus;
        vs_z[static_cast<std::size_t>(t)] = bne_revenue_bound(real, z_spec, dist);
    });

    std::vector<double> d_surplus(static_cast<std::size_t>(trials));
    std::vector<double> d_revenue(static_cast<std::size_t>(trials));
    for (long t = 0; t < trials; ++t) {
        d_surplus[static_cast<std::size_t>(t)] =
            vs_y[static_cast<std::size_t>(t)] - vs_z[static_cast<std::size_t>(t)];
        d_revenue[static_cast<std::size_t>(t)] =
            rev_y[static_cast<std::size_t>(t)] - vs_z[static_cast<std::size_t>(t)];
    }

    DominanceResult out;
    out.r = r;
    MeanSe a = mean_se(rev_y), b = mean_se(vs_z), c = mean_se(d_surplus), d = mean_se(d_revenue);
    out.proposed_revenue = a.mean;
    out.proposed_revenue_se = a.se;
    out.bound_revenue = b.mean;
    out.bound_revenue_se = b.se;
    out.surplus_gap = c.mean;
    out.surplus_gap_se = c.se;
    out.revenue_gap = d.mean;
    out.revenue_gap_se = d.se;
    out.trials = trials;
    try {
        out.condition_holds = r <= maincond_threshold(dist, r) + 1e-12;
    } catch (const GspError&) {
        out.condition_holds = false;
    }
    return out;
}

}  // namespace gsp
