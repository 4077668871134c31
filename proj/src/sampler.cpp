#include "simalign/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "simalign/matrix_fisher.hpp"

namespace simalign {

void ChainSettings::validate() const {
    if (iterations <= 0) throw InvalidArgument("iterations must be positive");
    if (burnin < 0 || burnin >= iterations) throw InvalidArgument("burnin must satisfy 0 <= burnin < iterations");
    if (thin <= 0) throw InvalidArgument("thin must be positive");
    if (n_scales != 1 && n_scales != 2) throw InvalidArgument("n_scales must be 1 or 2");
    if (match_moves < 0) throw InvalidArgument("match_moves must be nonnegative");
}

AcceptanceStats& AcceptanceStats::operator+=(const AcceptanceStats& o) {
    for (auto [mine, theirs] : {std::pair{&matching, &o.matching}, std::pair{&rotation, &o.rotation},
                                std::pair{&scale, &o.scale}, std::pair{&labels, &o.labels}}) {
        mine->proposed += theirs->proposed;
        mine->accepted += theirs->accepted;
    }
    return *this;
}

ChainState initial_state(const Configuration& X, const Configuration& Y, const PriorSpec& priors,
                         const ChainSettings& settings) {
    settings.validate();
    const int d = X.dim();
    if (Y.dim() != d) throw InvalidArgument("X and Y dimensions differ");
    priors.validate(d);
    if (settings.labeled && X.size() != Y.size()) throw InvalidArgument("labeled mode requires m = n");

    ChainState s;
    s.rotation = RotationMatrix::identity(d);
    Vector tau = Vector::Zero(d);
    if (priors.translation_enabled && X.size() > 0 && Y.size() > 0) tau = centroid(X) - centroid(Y);
    const double noise = priors.beta / priors.alpha;
    if (settings.n_scales == 1) {
        s.scales = {1.0};
    } else {
        s.scales = {0.9, 1.1};
        s.labels_x.resize(static_cast<std::size_t>(X.size()));
        s.labels_y.resize(static_cast<std::size_t>(Y.size()));
        for (int j = 0; j < X.size(); ++j) s.labels_x[j] = j % 2;
        for (int k = 0; k < Y.size(); ++k) s.labels_y[k] = k % 2;
    }
    s.translation.assign(s.scales.size(), tau);
    s.noise_vars.assign(s.scales.size(), noise);
    s.matching = settings.labeled ? MatchingMatrix::identity(X.size()) : MatchingMatrix(X.size(), Y.size());
    return s;
}

Chain::Chain(Configuration X, Configuration Y, PriorSpec priors, ChainSettings settings)
    : X_(std::move(X)), Y_(std::move(Y)), priors_(std::move(priors)), settings_(settings) {
    state_ = initial_state(X_, Y_, priors_, settings_);
    if (settings_.labeled) mask_.matching = false;
    if (!priors_.translation_enabled) mask_.translation = false;
    if (settings_.n_scales == 1) mask_.labels = false;
    log_post_ = simalign::log_posterior(state_, X_, Y_, priors_);
}

void Chain::set_state(ChainState state) {
    const double lp = simalign::log_posterior(state, X_, Y_, priors_);
    state_ = std::move(state);
    log_post_ = lp;
}

void Chain::update_matching(Rng& rng) {
    if (X_.size() == 0 || Y_.size() == 0) return;
    const int moves = settings_.match_moves > 0 ? settings_.match_moves : std::max(X_.size(), Y_.size());
    PairFilter filter;
    if (state_.n_scales() == 2) {
        filter = [this](int j, int k) { return state_.labels_x[j] == state_.labels_y[k]; };
    }
    for (int i = 0; i < moves; ++i) {
        MatchMove move = propose_match_move(state_.matching, settings_.order_constrained, rng, filter);
        if (move.kind == MatchMoveKind::none) continue;
        ++acceptance_.matching.proposed;
        ChainState candidate = state_;
        candidate.matching = std::move(move.proposal);
        const double lp = simalign::log_posterior(candidate, X_, Y_, priors_);
        const double log_ratio = lp - log_post_ + move.log_proposal_ratio;
        if (log_ratio >= 0 || std::log(uniform01(rng)) < log_ratio) {
            state_ = std::move(candidate);
            log_post_ = lp;
            ++acceptance_.matching.accepted;
        }
    }
}

void Chain::update_rotation(Rng& rng) {
    const Matrix F = rotation_conditional_param(state_, X_, Y_, priors_);
    RotationMoveStats stats;
    state_.rotation = matrix_fisher_transition(F, state_.rotation, rng, &stats);
    acceptance_.rotation.proposed += stats.proposed;
    acceptance_.rotation.accepted += stats.accepted;
    log_post_ = simalign::log_posterior(state_, X_, Y_, priors_);
}

void Chain::update_translation(Rng& rng) {
    if (!priors_.translation_enabled) return;
    for (int g = 0; g < state_.n_scales(); ++g) {
        const auto cond = translation_conditional(state_, X_, Y_, priors_, g);
        const double sd = std::sqrt(cond.variance);
        Vector tau = cond.mean;
        for (Eigen::Index i = 0; i < tau.size(); ++i) tau(i) += sd * standard_normal(rng);
        state_.translation[g] = std::move(tau);
    }
    log_post_ = simalign::log_posterior(state_, X_, Y_, priors_);
}

void Chain::update_noise(Rng& rng) {
    for (int g = 0; g < state_.n_scales(); ++g) {
        const auto cond = noise_conditional(state_, X_, Y_, priors_, g);
        const double precision = gamma_rate(cond.shape, cond.rate, rng);
        state_.noise_vars[g] = std::max(1.0 / precision, kNoiseVarianceFloor);
    }
    log_post_ = simalign::log_posterior(state_, X_, Y_, priors_);
}

void Chain::update_scales(Rng& rng) {
    for (int g = 0; g < state_.n_scales(); ++g) {
        const HngParams p = scale_conditional_params(state_, X_, Y_, priors_, g);
        double w;
        if (is_normalizable(p)) {
            w = hng_proposal_sd(p);
        } else {
            // Improper conditional (r <= 0); any scale that depends on p only keeps the proposal symmetric.
            w = p.nu > 0 ? 1.0 / std::sqrt(p.nu) : 1.0 / std::max(std::abs(p.delta), 1.0);
        }
        ++acceptance_.scale.proposed;
        const double proposal = state_.scales[g] + w * standard_normal(rng);
        if (!(proposal > 0)) continue;
        ChainState candidate = state_;
        candidate.scales[g] = proposal;
        const double lp = simalign::log_posterior(candidate, X_, Y_, priors_);
        const double log_ratio = lp - log_post_;
        if (log_ratio >= 0 || std::log(uniform01(rng)) < log_ratio) {
            state_ = std::move(candidate);
            log_post_ = lp;
            ++acceptance_.scale.accepted;
        }
    }
}

void Chain::update_labels(Rng& rng) {
    if (state_.n_scales() != 2) return;
    bool accepted = false;
    ChainState next = label_switch_move(state_, X_, Y_, priors_, rng, &accepted);
    ++acceptance_.labels.proposed;
    if (accepted) {
        state_ = std::move(next);
        log_post_ = simalign::log_posterior(state_, X_, Y_, priors_);
        ++acceptance_.labels.accepted;
    }
}

void Chain::sweep(Rng& rng) {
    if (mask_.matching) update_matching(rng);
    if (mask_.rotation) update_rotation(rng);
    if (mask_.translation) update_translation(rng);
    if (mask_.noise) update_noise(rng);
    if (mask_.scale) update_scales(rng);
    if (mask_.labels) update_labels(rng);
}

Sample Chain::snapshot(long iteration) const {
    Sample s;
    s.iteration = iteration;
    s.log_posterior = log_post_;
    s.rotation = state_.rotation.matrix();
    s.translation = state_.translation;
    s.scales = state_.scales;
    s.noise_vars = state_.noise_vars;
    s.pairs = state_.matching.pairs();
    s.labels_x = state_.labels_x;
    s.labels_y = state_.labels_y;
    return s;
}

ChainOutput run_chain(const Configuration& X, const Configuration& Y, const PriorSpec& priors,
                      const ChainSettings& settings, Rng& rng) {
    Chain chain(X, Y, priors, settings);
    ChainOutput out;
    out.dim = X.dim();
    out.m = X.size();
    out.n = Y.size();
    out.n_scales = settings.n_scales;
    out.samples.reserve(static_cast<std::size_t>((settings.iterations - settings.burnin) / settings.thin + 1));
    for (long it = 1; it <= settings.iterations; ++it) {
        chain.sweep(rng);
        if (it > settings.burnin && (it - settings.burnin) % settings.thin == 0) out.samples.push_back(chain.snapshot(it));
    }
    out.acceptance = chain.acceptance();
    return out;
}

ChainOutput run_chain(const Configuration& X, const Configuration& Y, const PriorSpec& priors,
                      const ChainSettings& settings) {
    Rng rng(settings.seed);
    return run_chain(X, Y, priors, settings, rng);
}

ChainState label_switch_move(const ChainState& state, const Configuration& X, const Configuration& Y,
                             const PriorSpec& priors, Rng& rng, bool* accepted) {
    if (state.n_scales() != 2) throw InvalidOperation("label switching needs the two-scale model");
    if (accepted) *accepted = false;
    // Items: every x (carrying its partner if matched) and every unmatched y.
    std::vector<int> unmatched_y;
    for (int k = 0; k < Y.size(); ++k) {
        if (state.matching.partner_of_y(k) == -1) unmatched_y.push_back(k);
    }
    const int items = X.size() + static_cast<int>(unmatched_y.size());
    if (items == 0) return state;
    const int pick = std::uniform_int_distribution<int>(0, items - 1)(rng);

    ChainState next = state;
    if (pick < X.size()) {
        next.labels_x[pick] ^= 1;
        const int k = state.matching.partner_of_x(pick);
        if (k != -1) next.labels_y[k] ^= 1;
    } else {
        next.labels_y[unmatched_y[pick - X.size()]] ^= 1;
    }
    const double log_ratio = log_joint_two_scale(next, X, Y, priors) - log_joint_two_scale(state, X, Y, priors);
    if (log_ratio >= 0 || std::log(uniform01(rng)) < log_ratio) {
        if (accepted) *accepted = true;
        return next;
    }
    return state;
}

ChainOutput merge_chains(const std::vector<ChainOutput>& chains) {
    if (chains.empty()) throw InvalidArgument("merge_chains: nothing to merge");
    ChainOutput out;
    out.dim = chains.front().dim;
    out.m = chains.front().m;
    out.n = chains.front().n;
    out.n_scales = chains.front().n_scales;
    for (const auto& c : chains) {
        if (c.dim != out.dim || c.m != out.m || c.n != out.n || c.n_scales != out.n_scales) {
            throw InvalidArgument("merge_chains: chains describe different problems");
        }
        out.samples.insert(out.samples.end(), c.samples.begin(), c.samples.end());
        out.acceptance += c.acceptance;
    }
    return out;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw InvalidArgument("quantile of an empty sample");
    if (!(p >= 0 && p <= 1)) throw InvalidArgument("quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double np = static_cast<double>(values.size()) * p;
    const double j = std::floor(np);
    const auto idx = static_cast<std::size_t>(j);
    if (np - j > 0) return values[std::min(idx, values.size() - 1)];
    if (idx == 0) return values.front();
    if (idx >= values.size()) return values.back();
    return 0.5 * (values[idx - 1] + values[idx]);
}

double PosteriorSummary::match_prob(int j, int k) const {
    const PairSummary* p = find(j, k);
    return p ? p->prob : 0.0;
}

const PairSummary* PosteriorSummary::find(int j, int k) const {
    for (const auto& p : matches) {
        if (p.j == j && p.k == k) return &p;
    }
    return nullptr;
}

PosteriorSummary summarize(const ChainOutput& output) {
    if (output.samples.empty()) throw InvalidArgument("summarize: no retained samples");
    const auto N = static_cast<double>(output.samples.size());
    const int d = output.dim;
    PosteriorSummary s;
    s.n_samples = static_cast<long>(output.samples.size());

    std::map<std::pair<int, int>, std::pair<long, long>> pair_counts;  // (matched, matched in group 0)
    std::map<int, long> l_counts;
    Matrix rotation_sum = Matrix::Zero(d, d);
    std::vector<Vector> tau_sum(static_cast<std::size_t>(output.n_scales), Vector::Zero(d));
    std::vector<std::vector<double>> scale_draws(static_cast<std::size_t>(output.n_scales));
    std::vector<double> noise_sum(static_cast<std::size_t>(output.n_scales), 0.0);

    for (const auto& sample : output.samples) {
        for (const auto& [j, k] : sample.pairs) {
            auto& counts = pair_counts[{j, k}];
            ++counts.first;
            if (sample.labels_x.empty() || sample.labels_x[j] == 0) ++counts.second;
        }
        ++l_counts[static_cast<int>(sample.pairs.size())];
        rotation_sum += sample.rotation;
        for (int g = 0; g < output.n_scales; ++g) {
            tau_sum[g] += sample.translation[g];
            scale_draws[g].push_back(sample.scales[g]);
            noise_sum[g] += sample.noise_vars[g];
        }
    }

    for (const auto& [pair, counts] : pair_counts) {
        PairSummary p{pair.first + 1, pair.second + 1, counts.first / N, std::nullopt};
        if (output.n_scales == 2) p.f0 = static_cast<double>(counts.second) / static_cast<double>(counts.first);
        s.matches.push_back(p);
    }
    for (const auto& [l, count] : l_counts) s.L_posterior[l] = count / N;
    s.mean_rotation = project_to_rotation<double>(rotation_sum / N);
    for (int g = 0; g < output.n_scales; ++g) {
        s.mean_translation.push_back(tau_sum[g] / N);
        s.mean_noise_var.push_back(noise_sum[g] / N);
        double sum = 0;
        for (double v : scale_draws[g]) sum += v;
        s.scales.push_back({quantile(scale_draws[g], 0.5), quantile(scale_draws[g], 0.025),
                            quantile(scale_draws[g], 0.975), sum / N});
    }
    s.acceptance = {{"matching", output.acceptance.matching.rate()},
                    {"rotation", output.acceptance.rotation.rate()},
                    {"scale", output.acceptance.scale.rate()},
                    {"labels", output.acceptance.labels.rate()}};
    return s;
}

std::vector<int> modal_labels_y(const ChainOutput& output) {
    std::vector<long> ones(static_cast<std::size_t>(output.n), 0);
    for (const auto& sample : output.samples) {
        for (std::size_t k = 0; k < sample.labels_y.size(); ++k) ones[k] += sample.labels_y[k];
    }
    std::vector<int> out(static_cast<std::size_t>(output.n), 0);
    if (output.n_scales == 2) {
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = 2 * ones[k] > static_cast<long>(output.samples.size());
    }
    return out;
}

}  // namespace simalign
