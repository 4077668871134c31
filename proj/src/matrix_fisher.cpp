#include "simalign/matrix_fisher.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace simalign {

namespace {

constexpr double kPi = M_PI;

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    return a <= -kPi ? a + 2.0 * kPi : a;
}

// Log target in Euler coordinates: tr(F^T A) plus the Haar density cos(theta13).
double euler_log_target(const Matrix& F, const std::array<double, 3>& angles) {
    const double c = std::cos(angles[1]);
    if (!(c > 0)) return -std::numeric_limits<double>::infinity();
    const Eigen::Matrix3d a = (Eigen::AngleAxisd(angles[0], Eigen::Vector3d::UnitZ()) *
                               Eigen::AngleAxisd(angles[1], Eigen::Vector3d::UnitY()) *
                               Eigen::AngleAxisd(angles[2], Eigen::Vector3d::UnitX()))
                                  .toRotationMatrix();
    return (F.array() * a.array()).sum() + std::log(c);
}

RotationMatrix from_angles(const std::array<double, 3>& angles) {
    return rotation_from_euler<double>({angles[0], angles[1], angles[2]});
}

std::array<double, 3> to_angles(const RotationMatrix& r) {
    const auto v = euler_from_rotation(r);
    std::array<double, 3> out{v[0], v[1], v[2]};
    // Keep strictly inside the chart.
    const double lim = kPi / 2 - 1e-9;
    out[1] = std::clamp(out[1], -lim, lim);
    return out;
}

// Random-walk scales from the curvature of the target at the mode of F.
// Depends on F only, so the proposal stays symmetric.
std::array<double, 3> proposal_scales(const Matrix& F) {
    RotationMatrix mode = RotationMatrix::identity(3);
    if (F.norm() > 0) mode = project_to_rotation(F);
    auto angles = to_angles(mode);
    const double lim = kPi / 2 - 0.1;
    angles[1] = std::clamp(angles[1], -lim, lim);
    const std::array<double, 3> caps{kPi, 0.8, kPi};
    const double h = 1e-4;
    const double f0 = euler_log_target(F, angles);
    std::array<double, 3> scales{};
    for (int i = 0; i < 3; ++i) {
        auto up = angles, down = angles;
        up[i] += h;
        down[i] -= h;
        const double curvature = -(euler_log_target(F, up) - 2 * f0 + euler_log_target(F, down)) / (h * h);
        const double s = curvature > 0 ? 2.4 / std::sqrt(curvature) : caps[i];
        scales[i] = std::clamp(s, 1e-4, caps[i]);
    }
    return scales;
}

}  // namespace

double matrix_fisher_log_density_unnorm(const Matrix& F, const RotationMatrix& A) {
    if (F.rows() != A.dim() || F.cols() != A.dim()) throw InvalidArgument("matrix-Fisher: dimension mismatch");
    return (F.array() * A.matrix().array()).sum();
}

double sample_von_mises(double mu, double kappa, Rng& rng) {
    if (!(kappa >= 0) || !std::isfinite(mu)) throw InvalidArgument("von Mises: need finite mu and kappa >= 0");
    if (kappa < 1e-8) return wrap_angle(mu + kPi * (2.0 * uniform01(rng) - 1.0));
    if (kappa > 1e5) return wrap_angle(mu + standard_normal(rng) / std::sqrt(kappa));
    // Best & Fisher (1979).
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    while (true) {
        const double z = std::cos(kPi * uniform01(rng));
        const double f = (1.0 + r * z) / (r + z);
        const double c = kappa * (r - f);
        const double u2 = uniform01(rng);
        if (c * (2.0 - c) - u2 > 0 || std::log(c / u2) + 1.0 - c >= 0) {
            const double theta = std::acos(std::clamp(f, -1.0, 1.0));
            return wrap_angle(uniform01(rng) < 0.5 ? mu - theta : mu + theta);
        }
    }
}

VonMisesParams matrix_fisher_angle_law(const Matrix& F) {
    if (F.rows() != 2 || F.cols() != 2) throw InvalidArgument("matrix_fisher_angle_law: F must be 2x2");
    // tr(F^T A) = (F00 + F11) cos t + (F10 - F01) sin t
    const double a = F(0, 0) + F(1, 1);
    const double b = F(1, 0) - F(0, 1);
    return {std::atan2(b, a), std::hypot(a, b)};
}

RotationMatrix matrix_fisher_transition(const Matrix& F, const RotationMatrix& current, Rng& rng,
                                        RotationMoveStats* stats) {
    if (!F.allFinite()) throw InvalidArgument("matrix-Fisher: non-finite parameter");
    const auto d = F.rows();
    if (F.cols() != d || (d != 2 && d != 3)) throw UnsupportedDimension("matrix-Fisher: only d = 2 or 3");
    if (current.dim() != d) throw InvalidArgument("matrix-Fisher: dimension mismatch");
    if (d == 2) {
        const auto law = matrix_fisher_angle_law(F);
        if (stats) {
            ++stats->proposed;
            ++stats->accepted;
        }
        return rotation_from_euler<double>({sample_von_mises(law.mu, law.kappa, rng)});
    }
    const auto scales = proposal_scales(F);
    auto angles = to_angles(current);
    double log_target = euler_log_target(F, angles);
    for (int i = 0; i < 3; ++i) {
        auto proposal = angles;
        proposal[i] += scales[i] * standard_normal(rng);
        if (i == 1) {
            if (!(std::abs(proposal[1]) < kPi / 2)) {
                if (stats) ++stats->proposed;
                continue;
            }
        } else {
            proposal[i] = wrap_angle(proposal[i]);
        }
        const double candidate = euler_log_target(F, proposal);
        if (stats) ++stats->proposed;
        const double log_ratio = candidate - log_target;
        if (log_ratio >= 0 || std::log(uniform01(rng)) < log_ratio) {
            angles = proposal;
            log_target = candidate;
            if (stats) ++stats->accepted;
        }
    }
    return from_angles(angles);
}

RotationMatrix sample_rotation_matrix_fisher(const Matrix& F, Rng& rng, int sweeps) {
    const auto d = F.rows();
    if (F.cols() != d || (d != 2 && d != 3)) throw UnsupportedDimension("matrix-Fisher: only d = 2 or 3");
    if (!F.allFinite()) throw InvalidArgument("matrix-Fisher: non-finite parameter");
    if (d == 2) return matrix_fisher_transition(F, RotationMatrix::identity(2), rng);
    RotationMatrix a = F.norm() > 0 ? project_to_rotation(F) : RotationMatrix::identity(3);
    for (int i = 0; i < std::max(sweeps, 1); ++i) a = matrix_fisher_transition(F, a, rng);
    return a;
}

RotationMatrix random_rotation(int d, Rng& rng) {
    if (d != 2 && d != 3) throw UnsupportedDimension("rotation dimension must be 2 or 3");
    Matrix g(d, d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) g(r, c) = standard_normal(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix rr = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < d; ++c) {
        if (rr(c, c) < 0) q.col(c) *= -1.0;
    }
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return project_to_rotation<double>(q);
}

}  // namespace simalign
