#pragma once

// Rotations drawn from the matrix-Fisher law, density exp{tr(F^T A)} with
// respect to Haar measure on SO(d).

#include "simalign/core.hpp"
#include "simalign/rng.hpp"

namespace simalign {

double matrix_fisher_log_density_unnorm(const Matrix& F, const RotationMatrix& A);

/// von Mises(mu, kappa) on (-pi, pi].
double sample_von_mises(double mu, double kappa, Rng& rng);

/// Angle parameters of the d = 2 reduction: tr(F^T A(theta)) = kappa cos(theta - mu).
struct VonMisesParams {
    double mu;
    double kappa;
};
VonMisesParams matrix_fisher_angle_law(const Matrix& F);

struct RotationMoveStats {
    int proposed{0};
    int accepted{0};
};

/// One transition of a kernel that leaves matrix-Fisher(F) invariant.
/// d = 2: an exact independent draw (current is ignored).
/// d = 3: one sweep of single-angle random-walk Metropolis updates on the
/// Z-Y-X Euler angles, targeting exp{tr(F^T A)} cos(theta13).
RotationMatrix matrix_fisher_transition(const Matrix& F, const RotationMatrix& current, Rng& rng,
                                        RotationMoveStats* stats = nullptr);

/// Stand-alone draw. Exact for d = 2; for d = 3 the Metropolis kernel is run
/// for `sweeps` transitions from the mode of F.
RotationMatrix sample_rotation_matrix_fisher(const Matrix& F, Rng& rng, int sweeps = 50);

/// Exact Haar-uniform rotation (QR of a Gaussian matrix with sign correction).
RotationMatrix random_rotation(int d, Rng& rng);

}  // namespace simalign
