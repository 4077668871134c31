#include "simalign/model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace simalign {

void PriorSpec::validate(int dim) const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0) || !std::isfinite(v)) throw InvalidArgument(std::string("prior ") + name + " must be positive");
    };
    positive(sigma_tau, "sigma_tau");
    positive(alpha, "alpha");
    positive(beta, "beta");
    positive(alpha_c, "alpha_c");
    positive(lambda_c, "lambda_c");
    positive(kappa, "kappa");
    if (F0.size() != 0 && (F0.rows() != dim || F0.cols() != dim)) throw InvalidArgument("prior F0 has wrong shape");
    if (F0.size() != 0 && !F0.allFinite()) throw InvalidArgument("prior F0 must be finite");
    if (mu_tau.size() != 0 && mu_tau.size() != dim) throw InvalidArgument("prior mu_tau has wrong dimension");
    if (mu_tau.size() != 0 && !mu_tau.allFinite()) throw InvalidArgument("prior mu_tau must be finite");
}

Matrix PriorSpec::concentration(int dim) const { return F0.size() == 0 ? Matrix::Zero(dim, dim) : F0; }

Vector PriorSpec::translation_mean(int dim) const { return mu_tau.size() == 0 ? Vector::Zero(dim) : mu_tau; }

int group_of_x(const ChainState& s, int j) { return s.labels_x.empty() ? 0 : s.labels_x[j]; }

int group_of_y(const ChainState& s, int k) { return s.labels_y.empty() ? 0 : s.labels_y[k]; }

void validate_state(const ChainState& s, const Configuration& X, const Configuration& Y) {
    const int d = X.dim();
    if (Y.dim() != d) throw InvalidArgument("X and Y dimensions differ");
    if (s.rotation.dim() != d) throw InvalidArgument("rotation dimension does not match the data");
    const int g = s.n_scales();
    if (g != 1 && g != 2) throw InvalidArgument("state must carry one or two scales");
    if (static_cast<int>(s.noise_vars.size()) != g || static_cast<int>(s.translation.size()) != g) {
        throw InvalidArgument("state: scales, noise_vars and translation must have equal length");
    }
    for (int i = 0; i < g; ++i) {
        if (!(s.scales[i] > 0)) throw InvalidArgument("state: scales must be positive");
        if (!(s.noise_vars[i] > 0)) throw InvalidArgument("state: noise variances must be positive");
        if (s.translation[i].size() != d) throw InvalidArgument("state: translation dimension mismatch");
    }
    if (s.matching.rows() != X.size() || s.matching.cols() != Y.size()) {
        throw InvalidArgument("state: matching shape does not match the configurations");
    }
    if (g == 2) {
        if (static_cast<int>(s.labels_x.size()) != X.size() || static_cast<int>(s.labels_y.size()) != Y.size()) {
            throw InvalidArgument("two-scale state requires a label for every point");
        }
        for (const auto& [j, k] : s.matching.pairs()) {
            if (s.labels_x[j] != s.labels_y[k]) throw InvalidArgument("matched points must share a group label");
        }
    }
}

namespace {

struct GroupTerms {
    int m{0}, n{0}, L{0};
    double residual_ss{0};   // sum ||x_j - c A y_k - tau||^2
    double y_ss{0};          // sum ||y_k||^2 over matched pairs
    double cross{0};         // sum (x_j - tau)^T A y_k
    Vector x_minus_cay;      // sum (x_j - c A y_k)
    Matrix outer;            // sum (x_j - tau) y_k^T
};

GroupTerms group_terms(const ChainState& s, const Configuration& X, const Configuration& Y, int group) {
    const int d = X.dim();
    GroupTerms t;
    t.x_minus_cay = Vector::Zero(d);
    t.outer = Matrix::Zero(d, d);
    for (int j = 0; j < X.size(); ++j) t.m += group_of_x(s, j) == group;
    for (int k = 0; k < Y.size(); ++k) t.n += group_of_y(s, k) == group;
    const Matrix& A = s.rotation.matrix();
    const double c = s.scales[group];
    const Vector& tau = s.translation[group];
    for (const auto& [j, k] : s.matching.pairs()) {
        if (group_of_x(s, j) != group) continue;
        ++t.L;
        const Vector x = X.point(j);
        const Vector y = Y.point(k);
        const Vector ay = A * y;
        const Vector xt = x - tau;
        t.residual_ss += (xt - c * ay).squaredNorm();
        t.y_ss += y.squaredNorm();
        t.cross += xt.dot(ay);
        t.x_minus_cay += x - c * ay;
        t.outer += xt * y.transpose();
    }
    return t;
}

// Prior, likelihood and matching terms belonging to one scale group.
double group_log_density(const ChainState& s, const GroupTerms& t, int group, int d, const PriorSpec& priors) {
    const double c = s.scales[group];
    const double phi = 1.0 / s.noise_vars[group];
    double lp = 0;
    if (priors.translation_enabled) {
        lp -= (s.translation[group] - priors.translation_mean(d)).squaredNorm() /
              (2.0 * priors.sigma_tau * priors.sigma_tau);
    }
    lp += (priors.alpha_c - 1.0) * std::log(c) - priors.lambda_c * c;
    lp += (priors.alpha - 1.0) * std::log(phi) - priors.beta * phi;
    lp += 0.5 * d * (t.n - t.m + t.L) * std::log(c);
    lp += 0.5 * t.L * d * std::log(phi);
    lp -= 0.25 * phi * t.residual_ss;
    return lp;
}

void require_group(const ChainState& s, std::optional<int> group, int& g) {
    if (s.n_scales() == 1) {
        if (group && *group != 0) throw InvalidArgument("one-scale state has only group 0");
        g = 0;
        return;
    }
    if (!group || (*group != 0 && *group != 1)) throw InvalidArgument("two-scale state: group must be 0 or 1");
    g = *group;
}

}  // namespace

double log_joint(const ChainState& state, const Configuration& X, const Configuration& Y, const PriorSpec& priors) {
    validate_state(state, X, Y);
    if (state.n_scales() != 1) throw InvalidArgument("log_joint expects a one-scale state");
    const int d = X.dim();
    const GroupTerms t = group_terms(state, X, Y, 0);
    return (priors.concentration(d).array() * state.rotation.matrix().array()).sum() +
           group_log_density(state, t, 0, d, priors) + t.L * std::log(priors.kappa);
}

double log_joint_two_scale(const ChainState& state, const Configuration& X, const Configuration& Y,
                           const PriorSpec& priors) {
    if (state.labels_x.empty() && X.size() > 0) throw InvalidArgument("log_joint_two_scale requires group labels");
    if (state.labels_y.empty() && Y.size() > 0) throw InvalidArgument("log_joint_two_scale requires group labels");
    validate_state(state, X, Y);
    if (state.n_scales() != 2) throw InvalidArgument("log_joint_two_scale expects a two-scale state");
    if (!(state.scales[1] > state.scales[0])) return -std::numeric_limits<double>::infinity();
    const int d = X.dim();
    double lp = (priors.concentration(d).array() * state.rotation.matrix().array()).sum();
    for (int g = 0; g < 2; ++g) {
        const GroupTerms t = group_terms(state, X, Y, g);
        lp += group_log_density(state, t, g, d, priors) + t.L * std::log(priors.kappa);
    }
    return lp;
}

double log_posterior(const ChainState& state, const Configuration& X, const Configuration& Y, const PriorSpec& priors) {
    return state.n_scales() == 2 ? log_joint_two_scale(state, X, Y, priors) : log_joint(state, X, Y, priors);
}

HngParams scale_conditional_params(const ChainState& state, const Configuration& X, const Configuration& Y,
                                   const PriorSpec& priors, std::optional<int> group) {
    int g = 0;
    require_group(state, group, g);
    const int d = X.dim();
    const GroupTerms t = group_terms(state, X, Y, g);
    const double two_var = 2.0 * state.noise_vars[g];
    return {0.5 * (t.n - t.m + t.L) * d + priors.alpha_c, t.y_ss / two_var, t.cross / two_var - priors.lambda_c};
}

Matrix rotation_conditional_param(const ChainState& state, const Configuration& X, const Configuration& Y,
                                  const PriorSpec& priors) {
    const int d = X.dim();
    Matrix F = priors.concentration(d);
    for (int g = 0; g < state.n_scales(); ++g) {
        const GroupTerms t = group_terms(state, X, Y, g);
        F += (state.scales[g] / (2.0 * state.noise_vars[g])) * t.outer;
    }
    return F;
}

SphericalNormal translation_conditional(const ChainState& state, const Configuration& X, const Configuration& Y,
                                        const PriorSpec& priors, std::optional<int> group) {
    if (!priors.translation_enabled) throw InvalidOperation("translation is disabled for this model");
    int g = 0;
    require_group(state, group, g);
    const int d = X.dim();
    const GroupTerms t = group_terms(state, X, Y, g);
    const double two_var = 2.0 * state.noise_vars[g];
    const double prior_prec = 1.0 / (priors.sigma_tau * priors.sigma_tau);
    const double variance = 1.0 / (t.L / two_var + prior_prec);
    Vector mean = variance * (t.x_minus_cay / two_var + priors.translation_mean(d) * prior_prec);
    return {std::move(mean), variance};
}

GammaParams noise_conditional(const ChainState& state, const Configuration& X, const Configuration& Y,
                              const PriorSpec& priors, std::optional<int> group) {
    int g = 0;
    require_group(state, group, g);
    const int d = X.dim();
    const GroupTerms t = group_terms(state, X, Y, g);
    return {priors.alpha + 0.5 * t.L * d, priors.beta + 0.25 * t.residual_ss};
}

}  // namespace simalign
