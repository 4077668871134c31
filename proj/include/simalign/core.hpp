#pragma once

// Geometry primitives and the point-configuration data model.
//
// Everything here is templated on the scalar type; the rest of the library
// instantiates it with double (see the aliases at the bottom).

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simalign/errors.hpp"

namespace simalign {

template <typename Scalar>
using PointMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kGeometryTolerance = 1e-10;

/// 1e-10 for double and wider; loosened for float, whose epsilon is ~1e-7.
template <typename Scalar>
constexpr Scalar geometry_tolerance() {
    const Scalar floor = Scalar(100) * std::numeric_limits<Scalar>::epsilon();
    return floor > Scalar(kGeometryTolerance) ? floor : Scalar(kGeometryTolerance);
}

/// An ordered set of d-dimensional points (one per row), optionally carrying
/// a strictly increasing sequence index and a {0,1} group label per point.
template <typename Scalar>
class BasicConfiguration {
public:
    BasicConfiguration() = default;

    BasicConfiguration(std::string id, PointMatrix<Scalar> points,
                       std::optional<std::vector<int>> seq = std::nullopt,
                       std::optional<std::vector<int>> group = std::nullopt)
        : id_(std::move(id)), points_(std::move(points)), seq_(std::move(seq)), group_(std::move(group)) {
        const auto d = points_.cols();
        if (d != 2 && d != 3) {
            throw UnsupportedDimension("configuration '" + id_ + "': dimension must be 2 or 3, got " +
                                       std::to_string(d));
        }
        if (!points_.allFinite()) throw InvalidArgument("configuration '" + id_ + "': non-finite coordinate");
        const auto m = static_cast<std::size_t>(points_.rows());
        if (seq_) {
            if (seq_->size() != m) throw InvalidArgument("configuration '" + id_ + "': seq length mismatch");
            for (std::size_t i = 1; i < m; ++i) {
                if ((*seq_)[i] <= (*seq_)[i - 1]) {
                    throw InvalidArgument("configuration '" + id_ + "': seq must be strictly increasing");
                }
            }
        }
        if (group_) {
            if (group_->size() != m) throw InvalidArgument("configuration '" + id_ + "': group length mismatch");
            for (int g : *group_) {
                if (g != 0 && g != 1) throw InvalidArgument("configuration '" + id_ + "': group label not in {0,1}");
            }
        }
    }

    const std::string& id() const noexcept { return id_; }
    int dim() const noexcept { return static_cast<int>(points_.cols()); }
    int size() const noexcept { return static_cast<int>(points_.rows()); }
    const PointMatrix<Scalar>& points() const noexcept { return points_; }
    auto point(int i) const { return points_.row(i).transpose(); }
    const std::optional<std::vector<int>>& seq() const noexcept { return seq_; }
    const std::optional<std::vector<int>>& group() const noexcept { return group_; }

    friend bool operator==(const BasicConfiguration& a, const BasicConfiguration& b) {
        return a.id_ == b.id_ && a.points_.rows() == b.points_.rows() && a.points_.cols() == b.points_.cols() &&
               a.points_ == b.points_ && a.seq_ == b.seq_ && a.group_ == b.group_;
    }

private:
    std::string id_;
    PointMatrix<Scalar> points_{0, 3};
    std::optional<std::vector<int>> seq_;
    std::optional<std::vector<int>> group_;
};

/// Element of SO(d), d in {2,3}. Construction checks orthonormality and det = +1.
template <typename Scalar>
class BasicRotation {
public:
    BasicRotation() : m_(Mat<Scalar>::Identity(3, 3)) {}

    explicit BasicRotation(Mat<Scalar> m, Scalar tol = geometry_tolerance<Scalar>()) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || (m_.rows() != 2 && m_.rows() != 3)) {
            throw UnsupportedDimension("rotation must be 2x2 or 3x3");
        }
        if (!is_rotation(m_, tol)) throw InvalidArgument("matrix is not a proper rotation");
    }

    static BasicRotation identity(int d) {
        if (d != 2 && d != 3) throw UnsupportedDimension("rotation dimension must be 2 or 3");
        BasicRotation r;
        r.m_ = Mat<Scalar>::Identity(d, d);
        return r;
    }

    static bool is_rotation(const Mat<Scalar>& m, Scalar tol = geometry_tolerance<Scalar>()) {
        if (m.rows() != m.cols()) return false;
        const auto d = m.rows();
        if (!m.allFinite()) return false;
        if (((m.transpose() * m) - Mat<Scalar>::Identity(d, d)).cwiseAbs().maxCoeff() > tol) return false;
        using std::abs;
        return abs(m.determinant() - Scalar(1)) <= tol;
    }

    int dim() const noexcept { return static_cast<int>(m_.rows()); }
    const Mat<Scalar>& matrix() const noexcept { return m_; }

    BasicRotation operator*(const BasicRotation& other) const {
        BasicRotation r;
        r.m_ = m_ * other.m_;
        return r;
    }

    BasicRotation transpose() const {
        BasicRotation r;
        r.m_ = m_.transpose();
        return r;
    }

private:
    Mat<Scalar> m_;
};

/// Maps y to scale * rotation * y + translation.
template <typename Scalar>
struct BasicSimilarity {
    BasicRotation<Scalar> rotation;
    Vec<Scalar> translation;
    Scalar scale{1};

    BasicSimilarity() = default;

    BasicSimilarity(BasicRotation<Scalar> r, Vec<Scalar> t, Scalar c)
        : rotation(std::move(r)), translation(std::move(t)), scale(c) {
        if (!(scale > Scalar(0)) || !std::isfinite(static_cast<double>(scale))) {
            throw InvalidArgument("similarity scale must be positive and finite");
        }
        if (translation.size() != rotation.dim()) throw InvalidArgument("translation dimension mismatch");
    }

    static BasicSimilarity identity(int d) {
        return BasicSimilarity(BasicRotation<Scalar>::identity(d), Vec<Scalar>::Zero(d), Scalar(1));
    }

    int dim() const noexcept { return rotation.dim(); }

    Vec<Scalar> apply(const Vec<Scalar>& y) const { return scale * (rotation.matrix() * y) + translation; }
};

/// d = 2: a single angle. d = 3: (theta12, theta13, theta23) composed as
/// Z(theta12) * Y(theta13) * X(theta23); theta13 must lie in (-pi/2, pi/2).
/// Haar measure in these coordinates is cos(theta13) dtheta12 dtheta13 dtheta23.
template <typename Scalar>
BasicRotation<Scalar> rotation_from_euler(const std::vector<Scalar>& angles) {
    using std::cos;
    using std::sin;
    for (Scalar a : angles) {
        if (!std::isfinite(static_cast<double>(a))) throw InvalidArgument("non-finite Euler angle");
    }
    if (angles.size() == 1) {
        Mat<Scalar> m(2, 2);
        const Scalar c = cos(angles[0]), s = sin(angles[0]);
        m << c, -s, s, c;
        return BasicRotation<Scalar>(m);
    }
    if (angles.size() != 3) throw InvalidArgument("expected 1 (d=2) or 3 (d=3) Euler angles");
    const Scalar half_pi = Scalar(M_PI / 2);
    if (!(angles[1] > -half_pi && angles[1] < half_pi)) {
        throw InvalidArgument("theta13 must lie in (-pi/2, pi/2)");
    }
    const Eigen::Matrix<Scalar, 3, 3> m = (Eigen::AngleAxis<Scalar>(angles[0], Eigen::Matrix<Scalar, 3, 1>::UnitZ()) *
                                           Eigen::AngleAxis<Scalar>(angles[1], Eigen::Matrix<Scalar, 3, 1>::UnitY()) *
                                           Eigen::AngleAxis<Scalar>(angles[2], Eigen::Matrix<Scalar, 3, 1>::UnitX()))
                                              .toRotationMatrix();
    return BasicRotation<Scalar>(Mat<Scalar>(m));
}

/// Inverse of rotation_from_euler; at gimbal lock (|theta13| = pi/2) theta23 is set to 0.
template <typename Scalar>
std::vector<Scalar> euler_from_rotation(const BasicRotation<Scalar>& r) {
    using std::asin;
    using std::atan2;
    const auto& a = r.matrix();
    if (r.dim() == 2) return {atan2(a(1, 0), a(0, 0))};
    Scalar s = -a(2, 0);
    if (s > Scalar(1)) s = Scalar(1);
    if (s < Scalar(-1)) s = Scalar(-1);
    const Scalar theta13 = asin(s);
    const Scalar theta12 = atan2(a(1, 0), a(0, 0));
    const Scalar theta23 = atan2(a(2, 1), a(2, 2));
    return {theta12, theta13, theta23};
}

/// Nearest rotation (Frobenius) to an arbitrary square matrix: the orthogonal
/// polar factor with the last singular direction flipped if needed for det = +1.
template <typename Scalar>
BasicRotation<Scalar> project_to_rotation(const Mat<Scalar>& m) {
    Eigen::JacobiSVD<Mat<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat<Scalar> u = svd.matrixU();
    const Mat<Scalar>& v = svd.matrixV();
    if ((u * v.transpose()).determinant() < Scalar(0)) u.col(u.cols() - 1) *= Scalar(-1);
    Mat<Scalar> r = u * v.transpose();
    return BasicRotation<Scalar>(r, std::max(Scalar(1e-8), geometry_tolerance<Scalar>()));
}

template <typename Scalar>
BasicConfiguration<Scalar> apply_similarity(const BasicConfiguration<Scalar>& cfg, const BasicSimilarity<Scalar>& t) {
    if (cfg.dim() != t.dim()) throw InvalidArgument("apply_similarity: dimension mismatch");
    PointMatrix<Scalar> out = (t.scale * (cfg.points() * t.rotation.matrix().transpose())).rowwise() +
                              t.translation.transpose();
    return BasicConfiguration<Scalar>(cfg.id(), std::move(out), cfg.seq(), cfg.group());
}

/// Returns the transform equivalent to applying `first` and then `second`.
template <typename Scalar>
BasicSimilarity<Scalar> compose(const BasicSimilarity<Scalar>& second, const BasicSimilarity<Scalar>& first) {
    if (first.dim() != second.dim()) throw InvalidArgument("compose: dimension mismatch");
    return BasicSimilarity<Scalar>(second.rotation * first.rotation,
                                   second.scale * (second.rotation.matrix() * first.translation) + second.translation,
                                   first.scale * second.scale);
}

template <typename Scalar>
Vec<Scalar> centroid(const BasicConfiguration<Scalar>& cfg) {
    if (cfg.size() == 0) throw InvalidArgument("centroid of an empty configuration");
    return cfg.points().colwise().mean().transpose();
}

using Configuration = BasicConfiguration<double>;
using RotationMatrix = BasicRotation<double>;
using SimilarityTransform = BasicSimilarity<double>;
using Vector = Vec<double>;
using Matrix = Mat<double>;

}  // namespace simalign
