#include "doctest.h"

#include <cmath>
#include <random>

#include "simalign/core.hpp"

using namespace simalign;

namespace {

Matrix rz(double t) {
    Matrix m(3, 3);
    m << std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t), 0, 0, 0, 1;
    return m;
}
Matrix ry(double t) {
    Matrix m(3, 3);
    m << std::cos(t), 0, std::sin(t), 0, 1, 0, -std::sin(t), 0, std::cos(t);
    return m;
}
Matrix rx(double t) {
    Matrix m(3, 3);
    m << 1, 0, 0, 0, std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t);
    return m;
}

Configuration cfg2(std::initializer_list<std::pair<double, double>> pts) {
    PointMatrix<double> p(static_cast<Eigen::Index>(pts.size()), 2);
    int i = 0;
    for (auto [a, b] : pts) {
        p(i, 0) = a;
        p(i, 1) = b;
        ++i;
    }
    return Configuration("t", p);
}

}  // namespace

TEST_SUITE("core") {
    TEST_CASE("euler angles in the plane") {
        CHECK((rotation_from_euler<double>({0.0}).matrix() - Matrix::Identity(2, 2)).norm() < 1e-15);
        Matrix q(2, 2);
        q << 0, -1, 1, 0;
        CHECK((rotation_from_euler<double>({M_PI / 2}).matrix() - q).norm() < 1e-15);
    }

    TEST_CASE("euler angles in space follow Z*Y*X") {
        const auto r = rotation_from_euler<double>({0.3, 0.2, 0.1});
        const Matrix expect = rz(0.3) * ry(0.2) * rx(0.1);
        CHECK((r.matrix() - expect).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(std::abs(r.matrix().determinant() - 1) < 1e-12);
        const auto back = euler_from_rotation(r);
        CHECK(back[0] == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(back[1] == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(back[2] == doctest::Approx(0.1).epsilon(1e-12));
    }

    TEST_CASE("euler construction rejects bad input") {
        CHECK_THROWS_AS(rotation_from_euler<double>({NAN}), InvalidArgument);
        CHECK_THROWS_AS(rotation_from_euler<double>({0.0, M_PI / 2, 0.0}), InvalidArgument);
        CHECK_THROWS_AS(rotation_from_euler<double>({0.0, 0.0}), InvalidArgument);
    }

    TEST_CASE("random euler triples always give rotations") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-M_PI, M_PI), v(-M_PI / 2 + 1e-9, M_PI / 2 - 1e-9);
        for (int i = 0; i < 1000; ++i) {
            const auto r = rotation_from_euler<double>({u(rng), v(rng), u(rng)});
            CHECK(RotationMatrix::is_rotation(r.matrix(), 1e-10));
        }
    }

    TEST_CASE("rotation validation") {
        Matrix refl = Matrix::Identity(2, 2);
        refl(1, 1) = -1;
        CHECK_THROWS_AS(RotationMatrix{refl}, InvalidArgument);
        CHECK_THROWS_AS(RotationMatrix(Matrix::Identity(4, 4)), UnsupportedDimension);
        CHECK_NOTHROW(RotationMatrix(Matrix::Identity(3, 3)));
    }

    TEST_CASE("configuration invariants") {
        PointMatrix<double> p(2, 3);
        p << 0, 0, 0, 1, 1, 1;
        CHECK_NOTHROW(Configuration("a", p, std::vector<int>{1, 4}, std::vector<int>{0, 1}));
        CHECK_THROWS_AS(Configuration("a", p, std::vector<int>{4, 4}), InvalidArgument);
        CHECK_THROWS_AS(Configuration("a", p, std::nullopt, std::vector<int>{0, 2}), InvalidArgument);
        PointMatrix<double> p4(1, 4);
        p4.setZero();
        CHECK_THROWS_AS(Configuration("a", p4), UnsupportedDimension);
        p(0, 0) = INFINITY;
        CHECK_THROWS_AS(Configuration("a", p), InvalidArgument);
    }

    TEST_CASE("apply_similarity examples") {
        PointMatrix<double> p(1, 3);
        p << 1, 1, 1;
        const Configuration c("a", p);
        CHECK(apply_similarity(c, SimilarityTransform::identity(3)) == c);
        const SimilarityTransform twice(RotationMatrix::identity(3), Vector::Zero(3), 2.0);
        CHECK((apply_similarity(c, twice).point(0) - Vector::Constant(3, 2.0)).norm() == 0);

        const auto q = cfg2({{1, 0}});
        Vector t(2);
        t << 1, 0;
        const SimilarityTransform s(rotation_from_euler<double>({M_PI / 2}), t, 1.0);
        const Vector out = apply_similarity(q, s).point(0);
        CHECK(out(0) == doctest::Approx(1.0));
        CHECK(out(1) == doctest::Approx(1.0));
        CHECK_THROWS_AS(apply_similarity(c, s), InvalidArgument);
    }

    TEST_CASE("apply_similarity is a group action and commutes with centroid") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> n01;
        for (int trial = 0; trial < 50; ++trial) {
            PointMatrix<double> p(6, 3);
            for (int i = 0; i < 6; ++i)
                for (int a = 0; a < 3; ++a) p(i, a) = n01(rng);
            const Configuration c("a", p);
            auto random_sim = [&]() {
                Vector t(3);
                t << n01(rng), n01(rng), n01(rng);
                return SimilarityTransform(rotation_from_euler<double>({n01(rng), 0.5 * std::tanh(n01(rng)), n01(rng)}), t,
                                           std::exp(0.3 * n01(rng)));
            };
            const auto t1 = random_sim();
            const auto t2 = random_sim();
            const auto lhs = apply_similarity(apply_similarity(c, t1), t2);
            const auto rhs = apply_similarity(c, compose(t2, t1));
            CHECK((lhs.points() - rhs.points()).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(compose(t2, t1).scale == doctest::Approx(t1.scale * t2.scale));
            CHECK((centroid(apply_similarity(c, t1)) - t1.apply(centroid(c))).norm() < 1e-10);
        }
    }

    TEST_CASE("centroid examples") {
        CHECK((centroid(cfg2({{3, 4}})) - Vector{{3, 4}}).norm() == 0);
        CHECK((centroid(cfg2({{0, 0}, {2, 0}})) - Vector{{1, 0}}).norm() == 0);
        CHECK_THROWS_AS(centroid(Configuration("e", PointMatrix<double>(0, 2))), InvalidArgument);
    }

    TEST_CASE("projection onto SO(d)") {
        const auto r = rotation_from_euler<double>({0.4, -0.3, 1.2});
        CHECK((project_to_rotation<double>(2.5 * r.matrix()).matrix() - r.matrix()).norm() < 1e-12);
        Matrix m = Matrix::Identity(3, 3);
        m(2, 2) = -1;  // reflection: nearest rotation flips the smallest singular direction
        CHECK(RotationMatrix::is_rotation(project_to_rotation<double>(m).matrix()));
    }

    TEST_CASE("core types are templated on the scalar") {
        const auto rf = rotation_from_euler<float>({0.5f});
        CHECK(BasicRotation<float>::is_rotation(rf.matrix(), 1e-6f));
        const auto rl = rotation_from_euler<long double>({0.1L, 0.2L, 0.3L});
        CHECK(BasicRotation<long double>::is_rotation(rl.matrix(), 1e-15L));
    }
}
