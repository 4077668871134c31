#pragma once

// Systematic-scan MCMC over the alignment posterior.
//
// One sweep updates, in order: the matching (Metropolis-Hastings moves), the
// rotation (matrix-Fisher kernel), the translation(s) (Gibbs), the noise
// precision(s) (Gibbs), the scale(s) (Metropolis with the halfnormal-gamma
// normal-approximation proposal) and, with two scales, one label switch.
// All Metropolis ratios are computed from differences of log_posterior.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simalign/model.hpp"
#include "simalign/rng.hpp"

namespace simalign {

struct ChainSettings {
    long iterations{100000};
    long burnin{10000};
    long thin{10};
    std::uint64_t seed{1};
    int n_scales{1};
    bool order_constrained{false};
    bool labeled{false};      // freeze M at {(j, j)}
    int match_moves{0};       // matching proposals per sweep; 0 means max(m, n)

    void validate() const;
};

struct UpdateMask {
    bool matching{true};
    bool rotation{true};
    bool translation{true};
    bool noise{true};
    bool scale{true};
    bool labels{true};
};

struct MoveCounter {
    long proposed{0};
    long accepted{0};

    double rate() const noexcept { return proposed == 0 ? 0.0 : static_cast<double>(accepted) / proposed; }
};

struct AcceptanceStats {
    MoveCounter matching;
    MoveCounter rotation;
    MoveCounter scale;
    MoveCounter labels;

    AcceptanceStats& operator+=(const AcceptanceStats& o);
};

/// A retained draw.
struct Sample {
    long iteration{0};
    double log_posterior{0};
    Matrix rotation;
    std::vector<Vector> translation;
    std::vector<double> scales;
    std::vector<double> noise_vars;
    std::vector<std::pair<int, int>> pairs;  // 0-based
    std::vector<int> labels_x;
    std::vector<int> labels_y;
};

struct ChainOutput {
    int dim{0};
    int m{0};
    int n{0};
    int n_scales{1};
    std::vector<Sample> samples;
    AcceptanceStats acceptance;
};

ChainState initial_state(const Configuration& X, const Configuration& Y, const PriorSpec& priors,
                         const ChainSettings& settings);

class Chain {
public:
    Chain(Configuration X, Configuration Y, PriorSpec priors, ChainSettings settings);

    const ChainState& state() const noexcept { return state_; }
    void set_state(ChainState state);
    void set_mask(const UpdateMask& mask) { mask_ = mask; }
    const UpdateMask& mask() const noexcept { return mask_; }

    double log_posterior() const noexcept { return log_post_; }
    const AcceptanceStats& acceptance() const noexcept { return acceptance_; }

    void sweep(Rng& rng);

    void update_matching(Rng& rng);
    void update_rotation(Rng& rng);
    void update_translation(Rng& rng);
    void update_noise(Rng& rng);
    void update_scales(Rng& rng);
    void update_labels(Rng& rng);

    Sample snapshot(long iteration) const;

private:
    Configuration X_;
    Configuration Y_;
    PriorSpec priors_;
    ChainSettings settings_;
    UpdateMask mask_;
    ChainState state_;
    double log_post_{0};
    AcceptanceStats acceptance_;
};

/// Runs `settings.iterations` sweeps with an engine seeded from settings.seed.
ChainOutput run_chain(const Configuration& X, const Configuration& Y, const PriorSpec& priors,
                      const ChainSettings& settings);
ChainOutput run_chain(const Configuration& X, const Configuration& Y, const PriorSpec& priors,
                      const ChainSettings& settings, Rng& rng);

/// Flip the group of one uniformly chosen item: a matched pair (jointly), an
/// unmatched x or an unmatched y. Accepted on the log_joint_two_scale difference.
ChainState label_switch_move(const ChainState& state, const Configuration& X, const Configuration& Y,
                             const PriorSpec& priors, Rng& rng, bool* accepted = nullptr);

/// Concatenates retained samples and sums acceptance counters.
ChainOutput merge_chains(const std::vector<ChainOutput>& chains);

struct PairSummary {
    int j;  // 1-based
    int k;  // 1-based
    double prob;
    std::optional<double> f0;  // share of the pair's matched draws spent in group 0
};

struct ScaleSummary {
    double median;
    double lo;    // 2.5%
    double hi;    // 97.5%
    double mean;
};

struct PosteriorSummary {
    long n_samples{0};
    std::vector<PairSummary> matches;  // every pair seen at least once, sorted by (j, k)
    std::vector<ScaleSummary> scales;
    RotationMatrix mean_rotation;
    std::vector<Vector> mean_translation;
    std::vector<double> mean_noise_var;
    std::map<std::string, double> acceptance;
    std::map<int, double> L_posterior;

    double match_prob(int j, int k) const;  // 1-based; 0 if never matched
    const PairSummary* find(int j, int k) const;
};

/// Empirical quantile that averages at ECDF jumps (Hyndman-Fan type 2).
double quantile(std::vector<double> values, double p);

PosteriorSummary summarize(const ChainOutput& output);

/// Most frequent label per Y point across draws (0 in one-scale mode).
std::vector<int> modal_labels_y(const ChainOutput& output);

}  // namespace simalign
