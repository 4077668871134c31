#pragma once

// The halfnormal-gamma law on (0, inf): density proportional to
//     c^(r-1) * exp(-nu c^2 / 2 + delta c).
// It is the full conditional of the scale factor under a gamma prior.

#include <vector>

#include "simalign/normal_approx.hpp"
#include "simalign/rng.hpp"

namespace simalign {

struct HngParams {
    double r{1};      // power parameter, > 0
    double nu{1};     // quadratic coefficient, >= 0
    double delta{0};  // linear coefficient
};

bool is_normalizable(const HngParams& p) noexcept;

/// Throws InvalidArgument unless the parameters are finite and normalizable.
void validate(const HngParams& p);

double hng_log_density_unnorm(double c, const HngParams& p);

/// Interior mode s_m = {delta + sqrt(delta^2 + 4 (r-1) nu)} / 2 nu.
/// Throws NoModeError when the density has no interior maximum.
double hng_mode(const HngParams& p);

/// N(s_m, {nu + (r-1)/s_m^2}^-1).
NormalApprox hng_normal_approx(const HngParams& p);

/// Proposal standard deviation used by the Metropolis update: the normal
/// approximation when a mode exists, otherwise a scale taken from the tails.
double hng_proposal_sd(const HngParams& p);

/// log of the Metropolis acceptance ratio for current -> proposal; -inf for proposal <= 0.
double hng_log_acceptance_ratio(double current, double proposal, const HngParams& p);

struct MetropolisStep {
    double value;
    bool accepted;
};

MetropolisStep hng_metropolis_step(double current, const HngParams& p, Rng& rng);

/// Exact acceptance-rejection sampler. For r >= 1 the log density is concave
/// and the envelope is the minimum of tangent lines (piecewise exponential);
/// for r < 1 it is a gamma envelope c^(r-1) exp(-b c).
class HngExactSampler {
public:
    explicit HngExactSampler(const HngParams& p);

    double operator()(Rng& rng) const;

    /// Normalizer of the target divided by envelope mass (by quadrature).
    double expected_acceptance() const;

    const HngParams& params() const noexcept { return p_; }

private:
    struct Segment {
        double lo, hi;        // hi may be +inf
        double intercept;     // log envelope = intercept + slope * c (shifted by log_shift_)
        double slope;
        double log_mass;
    };

    double sample_piecewise(Rng& rng) const;
    double sample_gamma_envelope(Rng& rng) const;
    double log_envelope(double c) const;

    HngParams p_;
    bool gamma_envelope_{false};
    double tangent_{0};     // gamma envelope tangent point
    double rate_{0};        // gamma envelope rate
    double log_shift_{0};
    std::vector<Segment> segments_;
    std::vector<double> cumulative_;
};

double hng_sample_exact(const HngParams& p, Rng& rng);

}  // namespace simalign
