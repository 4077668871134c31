#include "simalign/halfnormal_gamma.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "simalign/errors.hpp"

namespace simalign {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log density that also accepts c = 0 when r == 1 (finite there).
double log_density_closed(double c, const HngParams& p) {
    if (c == 0.0 && p.r == 1.0) return 0.0;
    return (p.r - 1.0) * std::log(c) - 0.5 * p.nu * c * c + p.delta * c;
}

double log_density_slope(double c, const HngParams& p) {
    const double power = (p.r == 1.0) ? 0.0 : (p.r - 1.0) / c;
    return power - p.nu * c + p.delta;
}

}  // namespace

bool is_normalizable(const HngParams& p) noexcept {
    if (!std::isfinite(p.r) || !std::isfinite(p.nu) || !std::isfinite(p.delta)) return false;
    if (!(p.r > 0) || p.nu < 0) return false;
    return p.nu > 0 || p.delta < 0;
}

void validate(const HngParams& p) {
    if (!is_normalizable(p)) {
        throw InvalidArgument("halfnormal-gamma parameters must satisfy r > 0 and (nu > 0 or (nu = 0 and delta < 0))");
    }
}

double hng_log_density_unnorm(double c, const HngParams& p) {
    if (!(c > 0)) throw InvalidArgument("halfnormal-gamma density is defined for c > 0 only");
    return (p.r - 1.0) * std::log(c) - 0.5 * p.nu * c * c + p.delta * c;
}

double hng_mode(const HngParams& p) {
    validate(p);
    const double rm1 = p.r - 1.0;
    if (rm1 <= 0 && p.delta <= 0) throw NoModeError("halfnormal-gamma: no interior mode (r <= 1 and delta <= 0)");
    if (p.nu == 0) {
        // gamma case: (r-1)/c + delta = 0
        if (rm1 <= 0) throw NoModeError("halfnormal-gamma: no interior mode");
        return rm1 / -p.delta;
    }
    const double disc = p.delta * p.delta + 4.0 * rm1 * p.nu;
    if (disc < 0) throw NoModeError("halfnormal-gamma: no interior mode (negative discriminant)");
    const double root = std::sqrt(disc);
    // Avoid cancellation when delta is large and negative.
    if (p.delta < 0 && rm1 > 0) return 2.0 * rm1 / (root - p.delta);
    return (p.delta + root) / (2.0 * p.nu);
}

NormalApprox hng_normal_approx(const HngParams& p) {
    const double mode = hng_mode(p);
    const double curvature = -(p.nu + (p.r - 1.0) / (mode * mode));
    if (!(curvature < 0)) throw NoModeError("halfnormal-gamma: mode is not a strict maximum");
    return expfam_normal_approx(curvature, mode);
}

double hng_proposal_sd(const HngParams& p) {
    validate(p);
    try {
        return std::sqrt(hng_normal_approx(p).variance);
    } catch (const NoModeError&) {
        double sd = kInf;
        if (p.nu > 0) sd = 1.0 / std::sqrt(p.nu);
        if (p.delta < 0) sd = std::min(sd, std::sqrt(p.r) / -p.delta);
        return sd;
    }
}

double hng_log_acceptance_ratio(double current, double proposal, const HngParams& p) {
    if (!(current > 0)) throw InvalidArgument("hng_log_acceptance_ratio: current value must be positive");
    if (!(proposal > 0)) return -kInf;
    return (p.r - 1.0) * std::log(proposal / current) - 0.5 * p.nu * (proposal * proposal - current * current) +
           p.delta * (proposal - current);
}

MetropolisStep hng_metropolis_step(double current, const HngParams& p, Rng& rng) {
    if (!(current > 0)) throw InvalidArgument("hng_metropolis_step: current value must be positive");
    const double w = hng_proposal_sd(p);
    const double proposal = current + w * standard_normal(rng);
    const double log_ratio = hng_log_acceptance_ratio(current, proposal, p);
    if (log_ratio >= 0 || std::log(uniform01(rng)) < log_ratio) return {proposal, true};
    return {current, false};
}

HngExactSampler::HngExactSampler(const HngParams& p) : p_(p) {
    validate(p_);
    if (p_.r < 1.0) {
        gamma_envelope_ = true;
        if (p_.nu == 0) {
            tangent_ = 0;
            rate_ = -p_.delta;
        } else {
            tangent_ = (p_.delta + std::sqrt(p_.delta * p_.delta + 4.0 * p_.nu * p_.r)) / (2.0 * p_.nu);
            rate_ = p_.nu * tangent_ - p_.delta;
        }
        return;
    }

    std::vector<double> points;
    try {
        const NormalApprox approx = hng_normal_approx(p_);
        const double s = approx.mean;
        const double w = std::sqrt(approx.variance);
        points = {s - w > 0 ? s - w : 0.5 * s, s, s + w};
    } catch (const NoModeError&) {
        // r == 1 with delta <= 0: decreasing density, finite at zero.
        double t = kInf;
        if (p_.nu > 0) t = 1.0 / std::sqrt(p_.nu);
        if (p_.delta < 0) t = std::min(t, 1.0 / -p_.delta);
        points = {0.0, t};
    }

    log_shift_ = -kInf;
    for (double t : points) log_shift_ = std::max(log_shift_, log_density_closed(t, p_));

    struct Line {
        double intercept, slope;
    };
    std::vector<Line> lines;
    for (double t : points) {
        const double slope = log_density_slope(t, p_);
        if (!lines.empty() && !(slope < lines.back().slope)) continue;
        lines.push_back({log_density_closed(t, p_) - log_shift_ - slope * t, slope});
    }
    if (!(lines.back().slope < 0)) throw InvalidArgument("halfnormal-gamma envelope: last tangent must decrease");

    double lo = 0.0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        double hi = kInf;
        if (i + 1 < lines.size()) {
            hi = (lines[i + 1].intercept - lines[i].intercept) / (lines[i].slope - lines[i + 1].slope);
        }
        const double a = lines[i].slope, b = lines[i].intercept;
        double log_mass;
        if (hi == kInf) {
            log_mass = b + a * lo - std::log(-a);
        } else if (a == 0) {
            log_mass = b + std::log(hi - lo);
        } else if (a > 0) {
            log_mass = b + a * hi + std::log(-std::expm1(-a * (hi - lo))) - std::log(a);
        } else {
            log_mass = b + a * lo + std::log(-std::expm1(a * (hi - lo))) - std::log(-a);
        }
        segments_.push_back({lo, hi, b, a, log_mass});
        lo = hi;
    }
    double max_log = -kInf;
    for (const auto& s : segments_) max_log = std::max(max_log, s.log_mass);
    double total = 0;
    for (const auto& s : segments_) {
        total += std::exp(s.log_mass - max_log);
        cumulative_.push_back(total);
    }
    for (double& c : cumulative_) c /= total;
}

double HngExactSampler::log_envelope(double c) const {
    for (const auto& s : segments_) {
        if (c <= s.hi) return s.intercept + s.slope * c;
    }
    return segments_.back().intercept + segments_.back().slope * c;
}

double HngExactSampler::sample_piecewise(Rng& rng) const {
    while (true) {
        const double pick = uniform01(rng);
        const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), pick);
        const Segment& s = segments_[std::min<std::size_t>(it - cumulative_.begin(), segments_.size() - 1)];
        const double u = uniform01(rng);
        double c;
        if (s.hi == kInf) {
            c = s.lo + std::log1p(-u) / s.slope;
        } else if (s.slope == 0) {
            c = s.lo + u * (s.hi - s.lo);
        } else if (s.slope > 0) {
            // expm1/log1p keep precision when the slope is tiny (tangent at the mode)
            c = s.hi + std::log1p((1.0 - u) * std::expm1(-s.slope * (s.hi - s.lo))) / s.slope;
        } else {
            c = s.lo + std::log1p(u * std::expm1(s.slope * (s.hi - s.lo))) / s.slope;
        }
        if (!(c > 0) || !std::isfinite(c)) continue;
        const double log_accept = (log_density_closed(c, p_) - log_shift_) - (s.intercept + s.slope * c);
        if (std::log(uniform01(rng)) <= log_accept) return c;
    }
}

double HngExactSampler::sample_gamma_envelope(Rng& rng) const {
    while (true) {
        const double c = gamma_rate(p_.r, rate_, rng);
        if (!(c > 0)) continue;
        if (p_.nu == 0) return c;
        const double d = c - tangent_;
        if (std::log(uniform01(rng)) <= -0.5 * p_.nu * d * d) return c;
    }
}

double HngExactSampler::operator()(Rng& rng) const {
    return gamma_envelope_ ? sample_gamma_envelope(rng) : sample_piecewise(rng);
}

double HngExactSampler::expected_acceptance() const {
    boost::math::quadrature::exp_sinh<double> integrator;
    if (gamma_envelope_) {
        // envelope: c^(r-1) exp(q(t) + q'(t)(c - t)), q(c) = -nu c^2/2 + delta c
        const double q_t = -0.5 * p_.nu * tangent_ * tangent_ + p_.delta * tangent_;
        const double log_env_const = q_t + rate_ * tangent_;
        const double log_env_mass = std::lgamma(p_.r) - p_.r * std::log(rate_) + log_env_const;
        auto ratio = [&](double c) {
            if (!(c > 0)) return 0.0;
            return std::exp(hng_log_density_unnorm(c, p_) - log_env_mass);
        };
        return integrator.integrate(ratio, 0.0, kInf);
    }
    double max_log = -kInf;
    for (const auto& s : segments_) max_log = std::max(max_log, s.log_mass);
    double env = 0;
    for (const auto& s : segments_) env += std::exp(s.log_mass - max_log);
    auto target = [&](double c) {
        if (!(c > 0)) return 0.0;
        return std::exp(log_density_closed(c, p_) - log_shift_ - max_log);
    };
    return integrator.integrate(target, 0.0, kInf) / env;
}

double hng_sample_exact(const HngParams& p, Rng& rng) { return HngExactSampler(p)(rng); }

}  // namespace simalign
