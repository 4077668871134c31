#pragma once

// Joint posterior of (A, tau, c, sigma_c^2, M) for aligning Y onto X via
// x ~ c A y + tau, and its two-scale generalization with group labels.
//
// The noise enters through the precision phi = sigma_c^-2, which carries a
// Gamma(alpha, beta) prior; log densities are with respect to d(phi), dc,
// d(tau) and Haar measure on A, up to additive constants.

#include <optional>
#include <vector>

#include "simalign/core.hpp"
#include "simalign/halfnormal_gamma.hpp"
#include "simalign/matching.hpp"

namespace simalign {

inline constexpr double kNoiseVarianceFloor = 1e-12;

struct PriorSpec {
    Matrix F0;             // matrix-Fisher concentration; empty means zero (uniform)
    Vector mu_tau;         // translation prior mean; empty means zero
    double sigma_tau{1000};
    double alpha{1};       // gamma prior on sigma_c^-2 (shape)
    double beta{1};        // (rate)
    double alpha_c{1};     // gamma prior on c (shape)
    double lambda_c{1};    // (rate)
    double kappa{1};       // matching propensity
    bool translation_enabled{true};

    /// Throws InvalidArgument on non-positive hyperparameters or wrong shapes.
    void validate(int dim) const;
    Matrix concentration(int dim) const;
    Vector translation_mean(int dim) const;
};

struct ChainState {
    RotationMatrix rotation;
    std::vector<Vector> translation;  // one per group; zero when translation is disabled
    std::vector<double> scales;       // c, or (c0, c1) with c1 > c0
    std::vector<double> noise_vars;   // sigma_c^2 per group
    MatchingMatrix matching;
    std::vector<int> labels_x;        // empty in one-scale mode
    std::vector<int> labels_y;

    int n_scales() const noexcept { return static_cast<int>(scales.size()); }
};

/// Group of a matched pair / point; always 0 in one-scale mode.
int group_of_x(const ChainState& s, int j);
int group_of_y(const ChainState& s, int k);

/// One-scale log joint. Exponent of c is d(n - m + L)/2.
double log_joint(const ChainState& state, const Configuration& X, const Configuration& Y, const PriorSpec& priors);

/// Two-scale log joint: per-group scale, noise and translation, shared A.
/// -inf when scales[1] <= scales[0].
double log_joint_two_scale(const ChainState& state, const Configuration& X, const Configuration& Y,
                           const PriorSpec& priors);

/// Dispatches on state.n_scales().
double log_posterior(const ChainState& state, const Configuration& X, const Configuration& Y, const PriorSpec& priors);

HngParams scale_conditional_params(const ChainState& state, const Configuration& X, const Configuration& Y,
                                   const PriorSpec& priors, std::optional<int> group = std::nullopt);

/// F0 + sum over groups of (c_g / 2 sigma_g^2) * sum_matched (x_j - tau_g) y_k^T.
Matrix rotation_conditional_param(const ChainState& state, const Configuration& X, const Configuration& Y,
                                  const PriorSpec& priors);

struct SphericalNormal {
    Vector mean;
    double variance;
};

SphericalNormal translation_conditional(const ChainState& state, const Configuration& X, const Configuration& Y,
                                        const PriorSpec& priors, std::optional<int> group = std::nullopt);

struct GammaParams {
    double shape;
    double rate;
};

/// Conditional of the precision sigma_c^-2 (per group).
GammaParams noise_conditional(const ChainState& state, const Configuration& X, const Configuration& Y,
                              const PriorSpec& priors, std::optional<int> group = std::nullopt);

/// Throws InvalidArgument if the state is inconsistent with X, Y (sizes,
/// label consistency of matched pairs, positivity).
void validate_state(const ChainState& state, const Configuration& X, const Configuration& Y);

}  // namespace simalign
