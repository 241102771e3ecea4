#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gsp/model.hpp"
#include "gsp/revenue.hpp"
#include "gsp/valuedist.hpp"

namespace gsp {

// Sample mean with its standard error (sample std / sqrt(n)).
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};
MeanSe mean_se(const std::vector<double>& xs);

// How sweep points are evaluated. LowestSne computes realised equilibrium
// metrics and admits only in-class rules. BneBound additionally admits the
// reserve-price filter, scoring it by the truthful-bid virtual surplus.
enum class SweepMode { LowestSne, BneBound };

// One point of a parameter grid: a concrete ranking rule plus the swept
// parameter values it came from (NaN when a parameter does not apply).
struct SpecPoint {
    RankingSpec spec;
    std::string family;
    double r = std::numeric_limits<double>::quiet_NaN();
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double rho = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentConfig {
    PopulationModel population;
    int bidders = 8;
    SlotCurve slots;
    std::vector<SpecPoint> grid;
    long trials = 10000;
    std::uint64_t seed = 1;
    SweepMode mode = SweepMode::BneBound;

    void validate() const;
};

// Aggregated simulation result for one grid point.
struct OperatingPoint {
    std::string family;
    double r = std::numeric_limits<double>::quiet_NaN();
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double rho = std::numeric_limits<double>::quiet_NaN();
    double revenue = 0.0, revenue_se = 0.0;
    double welfare = 0.0, welfare_se = 0.0;
    double clicks = 0.0, clicks_se = 0.0;
    long trials = 0;
};

// The shared realisation stream: trial t is drawn from mix_seed(seed, t), so
// every grid point sees identical bidders (common random numbers).
std::vector<Realisation> sample_realisations(const PopulationModel& population,
                                             int bidders, const SlotCurve& slots,
                                             long trials, std::uint64_t seed);

// Evaluate every grid point across the common realisation stream.
std::vector<OperatingPoint> run_sweep(const ExperimentConfig& config);

enum class FrontierX { Welfare, ClickYield };

// Pareto-maximal subset when maximising (x metric, revenue) jointly, sorted
// by the x metric ascending. Points tied in both coordinates are all kept.
std::vector<OperatingPoint> frontier(const std::vector<OperatingPoint>& points,
                                     FrontierX x_metric);

// Paired comparison of the reserve-in-score rule against the filtered
// standard rule at the same reserve, on common random numbers.
struct DominanceResult {
    double r = 0.0;
    double proposed_revenue = 0.0, proposed_revenue_se = 0.0;  // realised equilibrium
    double bound_revenue = 0.0, bound_revenue_se = 0.0;        // filtered-rule bound
    double surplus_gap = 0.0, surplus_gap_se = 0.0;            // per-trial surplus diff
    double revenue_gap = 0.0, revenue_gap_se = 0.0;            // per-trial revenue diff
    bool condition_holds = false;
    long trials = 0;
};

DominanceResult dominance_experiment(const PopulationModel& population,
                                     const SlotCurve& slots, int bidders, double r,
                                     long trials, std::uint64_t seed);

}  // namespace gsp
