#include "gsp/valuedist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gsp/errors.hpp"

namespace gsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2Pi = 2.50662827463100050242;

double clamp_unit_open(double u) {
    const double eps = 0x1.0p-53;
    return std::min(std::max(u, eps), 1.0 - eps);
}

// Mills ratio of the standard normal, stable for large arguments.
double mills_ratio(double x) {
    if (x > 8.0) {
        double x2 = x * x;
        return (1.0 - 1.0 / x2 * (1.0 - 3.0 / x2 * (1.0 - 5.0 / x2))) / x;
    }
    double phi = std::exp(-0.5 * x * x) / kSqrt2Pi;
    return normal_cdf(-x) / phi;
}

}  // namespace

ValueDistribution ValueDistribution::uniform(double lo, double hi) {
    if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
        throw InvalidInput("uniform needs 0 <= lo < hi");
    }
    return ValueDistribution(Kind::Uniform, lo, hi);
}

ValueDistribution ValueDistribution::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw InvalidInput("exponential rate must be positive");
    }
    return ValueDistribution(Kind::Exponential, rate, 0.0);
}

ValueDistribution ValueDistribution::lognormal(double mu, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
        throw InvalidInput("lognormal needs finite mu and positive sigma");
    }
    return ValueDistribution(Kind::LogNormal, mu, sigma);
}

ValueDistribution ValueDistribution::beta22() {
    return ValueDistribution(Kind::Beta22, 0.0, 0.0);
}

double ValueDistribution::pdf(double t) const {
    switch (kind_) {
        case Kind::Uniform:
            return (t >= a_ && t <= b_) ? 1.0 / (b_ - a_) : 0.0;
        case Kind::Exponential:
            return t >= 0.0 ? a_ * std::exp(-a_ * t) : 0.0;
        case Kind::LogNormal: {
            if (t <= 0.0) {
                return 0.0;
            }
            double x = (std::log(t) - a_) / b_;
            return std::exp(-0.5 * x * x) / (t * b_ * kSqrt2Pi);
        }
        case Kind::Beta22:
            return (t >= 0.0 && t <= 1.0) ? 6.0 * t * (1.0 - t) : 0.0;
    }
    return 0.0;
}

double ValueDistribution::cdf(double t) const {
    switch (kind_) {
        case Kind::Uniform:
            if (t <= a_) return 0.0;
            if (t >= b_) return 1.0;
            return (t - a_) / (b_ - a_);
        case Kind::Exponential:
            return t <= 0.0 ? 0.0 : -std::expm1(-a_ * t);
        case Kind::LogNormal:
            return t <= 0.0 ? 0.0 : normal_cdf((std::log(t) - a_) / b_);
        case Kind::Beta22:
            if (t <= 0.0) return 0.0;
            if (t >= 1.0) return 1.0;
            return t * t * (3.0 - 2.0 * t);
    }
    return 0.0;
}

double ValueDistribution::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) {
        throw InvalidInput("quantile argument must lie in (0,1)");
    }
    switch (kind_) {
        case Kind::Uniform:
            return a_ + u * (b_ - a_);
        case Kind::Exponential:
            return -std::log1p(-u) / a_;
        case Kind::LogNormal:
            return std::exp(a_ + b_ * normal_quantile(u));
        case Kind::Beta22: {
            // Invert t^2 (3 - 2t) = u by safeguarded Newton on [0,1].
            double lo = 0.0, hi = 1.0, t = u;
            for (int it = 0; it < 200; ++it) {
                double f = t * t * (3.0 - 2.0 * t) - u;
                if (f > 0.0) {
                    hi = t;
                } else {
                    lo = t;
                }
                double fp = 6.0 * t * (1.0 - t);
                double step = fp > 1e-12 ? f / fp : 0.0;
                double next = t - step;
                if (!(next > lo && next < hi) || step == 0.0) {
                    next = 0.5 * (lo + hi);
                }
                if (std::abs(next - t) < 1e-16) {
                    t = next;
                    break;
                }
                t = next;
            }
            return t;
        }
    }
    return 0.0;
}

double ValueDistribution::support_lower() const {
    switch (kind_) {
        case Kind::Uniform:
            return a_;
        case Kind::Exponential:
        case Kind::LogNormal:
        case Kind::Beta22:
            return 0.0;
    }
    return 0.0;
}

double ValueDistribution::support_upper() const {
    switch (kind_) {
        case Kind::Uniform:
            return b_;
        case Kind::Exponential:
        case Kind::LogNormal:
            return kInf;
        case Kind::Beta22:
            return 1.0;
    }
    return kInf;
}

std::string ValueDistribution::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Uniform:
            os << "uniform(" << a_ << "," << b_ << ")";
            break;
        case Kind::Exponential:
            os << "exponential(" << a_ << ")";
            break;
        case Kind::LogNormal:
            os << "lognormal(" << a_ << "," << b_ << ")";
            break;
        case Kind::Beta22:
            os << "beta22";
            break;
    }
    return os.str();
}

double virtual_value(const ValueDistribution& dist, double t) {
    switch (dist.kind()) {
        case ValueDistribution::Kind::Uniform:
            if (t < dist.param_a() || t > dist.param_b()) {
                throw UndefinedVirtualValue("point outside uniform support");
            }
            return 2.0 * t - dist.param_b();
        case ValueDistribution::Kind::Exponential:
            if (t < 0.0) {
                throw UndefinedVirtualValue("point outside exponential support");
            }
            return t - 1.0 / dist.param_a();
        case ValueDistribution::Kind::LogNormal: {
            if (t <= 0.0) {
                throw UndefinedVirtualValue("point outside lognormal support");
            }
            double x = (std::log(t) - dist.param_a()) / dist.param_b();
            return t - t * dist.param_b() * mills_ratio(x);
        }
        case ValueDistribution::Kind::Beta22:
            if (t <= 0.0 || t > 1.0) {
                throw UndefinedVirtualValue("point outside beta support");
            }
            return 4.0 * t / 3.0 - 1.0 / 6.0 - 1.0 / (6.0 * t);
    }
    throw UndefinedVirtualValue("unknown kind");
}

double virtual_value_prime(const ValueDistribution& dist, double t) {
    switch (dist.kind()) {
        case ValueDistribution::Kind::Uniform:
            if (t < dist.param_a() || t > dist.param_b()) {
                throw UndefinedVirtualValue("point outside uniform support");
            }
            return 2.0;
        case ValueDistribution::Kind::Exponential:
            if (t < 0.0) {
                throw UndefinedVirtualValue("point outside exponential support");
            }
            return 1.0;
        case ValueDistribution::Kind::Beta22:
            if (t <= 0.0 || t > 1.0) {
                throw UndefinedVirtualValue("point outside beta support");
            }
            return 4.0 / 3.0 + 1.0 / (6.0 * t * t);
        case ValueDistribution::Kind::LogNormal: {
            double step = 1e-6 * std::max(1.0, std::abs(t));
            if (t - step <= 0.0) {
                step = 0.5 * t;
            }
            double up = virtual_value(dist, t + step);
            double dn = virtual_value(dist, t - step);
            return (up - dn) / (2.0 * step);
        }
    }
    throw UndefinedVirtualValue("unknown kind");
}

namespace {

double effective_upper(const ValueDistribution& dist) {
    double hi = dist.support_upper();
    return std::isfinite(hi) ? hi : dist.quantile(1.0 - 1e-6);
}

}  // namespace

double reserve_root(const ValueDistribution& dist) {
    const double lo = dist.quantile(1e-9);
    const double hi = effective_upper(dist);
    const int n = 4096;

    double prev_t = lo;
    double prev_phi = virtual_value(dist, lo);
    double bracket_lo = 0.0, bracket_hi = 0.0;
    int sign_changes = 0;
    for (int k = 1; k <= n; ++k) {
        double t = lo + (hi - lo) * static_cast<double>(k) / n;
        double phi = virtual_value(dist, t);
        if ((prev_phi <= 0.0 && phi > 0.0) || (prev_phi >= 0.0 && phi < 0.0)) {
            ++sign_changes;
            bracket_lo = prev_t;
            bracket_hi = t;
        }
        prev_t = t;
        prev_phi = phi;
    }
    if (sign_changes == 0) {
        throw NoRoot("virtual value does not change sign on the support");
    }
    if (sign_changes > 1) {
        throw NoRoot("virtual value is not monotone enough for a unique root");
    }

    double fa = virtual_value(dist, bracket_lo);
    double mid = 0.5 * (bracket_lo + bracket_hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (bracket_lo + bracket_hi);
        double fm = virtual_value(dist, mid);
        if (std::abs(fm) <= 1e-10) {
            return mid;
        }
        if ((fa < 0.0) == (fm < 0.0)) {
            bracket_lo = mid;
            fa = fm;
        } else {
            bracket_hi = mid;
        }
    }
    return mid;
}

double maincond_threshold(const ValueDistribution& dist, double r) {
    const double theta_bar = reserve_root(dist);
    if (!(r > 0.0) || r > theta_bar + 1e-12) {
        throw InvalidInput("reserve must lie in (0, reserve_root]");
    }

    const double hi = effective_upper(dist);
    auto psi = [&](double t) {
        double dphi = virtual_value_prime(dist, t);
        if (!(dphi > 0.0)) {
            throw ConditionInapplicable("virtual value is not increasing at t=" +
                                        std::to_string(t));
        }
        return t - virtual_value(dist, t) / dphi;
    };

    const int n = 20000;
    double best = kInf;
    int best_k = 0;
    for (int k = 0; k <= n; ++k) {
        double t = r + (hi - r) * static_cast<double>(k) / n;
        double v = psi(t);
        if (v < best) {
            best = v;
            best_k = k;
        }
    }

    // Golden-section refinement inside the bracket around the best grid point.
    double a = r + (hi - r) * static_cast<double>(std::max(0, best_k - 1)) / n;
    double b = r + (hi - r) * static_cast<double>(std::min(n, best_k + 1)) / n;
    const double gr = 0.61803398874989484820;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = psi(x1);
    double f2 = psi(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = psi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = psi(x2);
        }
        best = std::min(best, std::min(f1, f2));
    }
    return best;
}

void PopulationModel::validate() const {
    if (!(correlation >= -1.0 && correlation <= 1.0)) {
        throw InvalidInput("copula correlation must lie in [-1,1]");
    }
}

void PopulationModel::validate_for_auction() const {
    validate();
    if (relevance_dist.support_lower() < 0.0 || relevance_dist.support_upper() > 1.0) {
        throw InvalidInput("relevance distribution support must lie within (0,1]");
    }
}

std::vector<Bidder> sample_population(const PopulationModel& model, int n, Rng& rng) {
    model.validate();
    if (n < 0) {
        throw InvalidInput("bidder count must be nonnegative");
    }
    std::vector<Bidder> out;
    out.reserve(static_cast<std::size_t>(n));
    const double c = model.correlation;
    const double tail = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int i = 0; i < n; ++i) {
        double u1 = rng.uniform();
        double u2 = rng.uniform();
        double v2 = u2;
        if (c != 0.0) {
            double z1 = normal_quantile(u1);
            double z2 = c * z1 + tail * normal_quantile(u2);
            v2 = clamp_unit_open(normal_cdf(z2));
        }
        Bidder b;
        b.value = model.value_dist.quantile(u1);
        b.relevance = model.relevance_dist.quantile(v2);
        b.id = i;
        out.push_back(b);
    }
    return out;
}

std::vector<Bidder> sample_population(const PopulationModel& model, int n,
                                      std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0));
    return sample_population(model, n, rng);
}

}  // namespace gsp
