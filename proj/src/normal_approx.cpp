#include "simalign/normal_approx.hpp"

#include <cmath>

#include "simalign/errors.hpp"

namespace simalign {

NormalApprox expfam_normal_approx(double second_derivative, double mode) {
    if (!std::isfinite(second_derivative) || !std::isfinite(mode)) {
        throw InvalidArgument("expfam_normal_approx: non-finite input");
    }
    if (second_derivative >= 0) {
        throw InvalidArgument("expfam_normal_approx: log density must be strictly concave at the mode");
    }
    return {mode, -1.0 / second_derivative};
}

NormalApprox gamma_normal_approx(double shape, double rate) {
    if (!(shape > 1) || !(rate > 0)) throw InvalidArgument("gamma_normal_approx: need shape > 1 and rate > 0");
    // l = (shape-1) log x - rate x ; l'' = -(shape-1)/x^2
    const double mode = (shape - 1) / rate;
    return expfam_normal_approx(-(shape - 1) / (mode * mode), mode);
}

NormalApprox von_mises_normal_approx(double mu, double kappa) {
    if (!(kappa > 0)) throw InvalidArgument("von_mises_normal_approx: kappa must be positive");
    // l = kappa cos(x - mu) ; l''(mu) = -kappa
    return expfam_normal_approx(-kappa, mu);
}

NormalApprox normal_normal_approx(double mu, double sigma2) {
    if (!(sigma2 > 0)) throw InvalidArgument("normal_normal_approx: variance must be positive");
    return expfam_normal_approx(-1.0 / sigma2, mu);
}

}  // namespace simalign
