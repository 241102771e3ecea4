#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsp/model.hpp"
#include "gsp/rng.hpp"

namespace gsp {

// Scalar distribution used for both values and relevances. Each kind carries
// closed-form density, CDF and quantile so sampling and the virtual-value
// machinery stay exact and platform independent.
class ValueDistribution {
public:
    enum class Kind { Uniform, Exponential, LogNormal, Beta22 };

    static ValueDistribution uniform(double lo, double hi);
    static ValueDistribution exponential(double rate);
    static ValueDistribution lognormal(double mu, double sigma);
    static ValueDistribution beta22();

    Kind kind() const { return kind_; }
    double param_a() const { return a_; }
    double param_b() const { return b_; }

    double pdf(double t) const;
    double cdf(double t) const;
    double quantile(double u) const;  // u in (0,1)

    double support_lower() const;
    double support_upper() const;  // +infinity for unbounded kinds

    // True for the kinds with a monotone hazard rate. The revenue-bound and
    // dominance machinery is only offered for these.
    bool mhr() const { return kind_ != Kind::LogNormal; }

    double sample(Rng& rng) const { return quantile(rng.uniform()); }

    std::string describe() const;

private:
    ValueDistribution(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

    Kind kind_;
    double a_;
    double b_;
};

// Virtual value theta - (1 - F)/f, by closed form per kind.
double virtual_value(const ValueDistribution& dist, double t);

// Derivative of the virtual value: closed form where one exists, otherwise a
// central finite difference with step 1e-6 * max(1, |t|).
double virtual_value_prime(const ValueDistribution& dist, double t);

// Root of the virtual value (the exclusion reserve). Scans for a single sign
// change, then bisects until |virtual value| <= 1e-10.
double reserve_root(const ValueDistribution& dist);

// inf over t in [r, T] of t - phi(t)/phi'(t), the largest reserve for which
// the revenue-dominance side condition r <= inf{...} can be certified. Uses a
// dense grid (>= 10^4 points, T truncated at the 1 - 1e-6 quantile) followed
// by golden-section refinement around the best bracket.
double maincond_threshold(const ValueDistribution& dist, double r);

// Joint bidder population: value and relevance marginals tied by a Gaussian
// copula with the given correlation parameter.
struct PopulationModel {
    ValueDistribution value_dist;
    ValueDistribution relevance_dist;
    double correlation = 0.0;

    void validate() const;
    // Auction experiments additionally require relevance support within (0,1].
    void validate_for_auction() const;
};

// Draw n bidders from the population; deterministic given the seed.
std::vector<Bidder> sample_population(const PopulationModel& model, int n,
                                      std::uint64_t seed);

// Same, drawing from a caller-provided generator. Each bidder consumes
// exactly two uniforms, which keeps common-random-number streams aligned.
std::vector<Bidder> sample_population(const PopulationModel& model, int n, Rng& rng);

}  // namespace gsp
