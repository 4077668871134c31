#pragma once

namespace simalign {

struct NormalApprox {
    double mean;
    double variance;
};

/// Normal approximation for a unimodal exponential-family density: centred at
/// the mode with variance -1 / l''(mode). Requires l''(mode) < 0.
NormalApprox expfam_normal_approx(double logdensity_second_derivative_at_mode, double mode);

/// Gamma(shape, rate), shape > 1: N((shape-1)/rate, (shape-1)/rate^2).
NormalApprox gamma_normal_approx(double shape, double rate);

/// von Mises(mu, kappa): N(mu, 1/kappa).
NormalApprox von_mises_normal_approx(double mu, double kappa);

/// N(mu, sigma2) is its own approximation.
NormalApprox normal_normal_approx(double mu, double sigma2);

}  // namespace simalign
