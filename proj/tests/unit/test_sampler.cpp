#include "doctest.h"

#include <map>
#include <sstream>

#include "oracles.hpp"
#include "simalign/halfnormal_gamma.hpp"
#include "simalign/matrix_fisher.hpp"
#include "simalign/sampler.hpp"
#include "simalign/trace_io.hpp"

using namespace simalign;

namespace {

Configuration random_cfg(const std::string& id, int m, int d, Rng& rng, double spread = 3.0) {
    PointMatrix<double> p(m, d);
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < d; ++a) p(i, a) = spread * standard_normal(rng);
    return Configuration(id, p);
}

ChainSettings short_settings(long iters, std::uint64_t seed) {
    ChainSettings s;
    s.iterations = iters;
    s.burnin = iters / 10;
    s.thin = 5;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_SUITE("sampler") {
    TEST_CASE("settings validation") {
        ChainSettings s;
        CHECK_NOTHROW(s.validate());
        s.burnin = s.iterations;
        CHECK_THROWS_AS(s.validate(), InvalidArgument);
        s = ChainSettings{};
        s.thin = 0;
        CHECK_THROWS_AS(s.validate(), InvalidArgument);
        s = ChainSettings{};
        s.n_scales = 3;
        CHECK_THROWS_AS(s.validate(), InvalidArgument);
    }

    TEST_CASE("initial state") {
        Rng rng(1);
        const auto X = random_cfg("X", 4, 3, rng);
        const auto Y = random_cfg("Y", 5, 3, rng);
        PriorSpec pr;
        pr.alpha = 2;
        pr.beta = 8;
        ChainSettings st;
        st.n_scales = 2;
        const auto s = initial_state(X, Y, pr, st);
        CHECK(s.scales == std::vector<double>{0.9, 1.1});
        CHECK(s.noise_vars == std::vector<double>{4.0, 4.0});
        CHECK((s.translation[0] - (centroid(X) - centroid(Y))).norm() < 1e-12);
        CHECK(s.labels_x == std::vector<int>{0, 1, 0, 1});
        CHECK(s.matching.size() == 0);
        st.labeled = true;
        CHECK_THROWS_AS(initial_state(X, Y, pr, st), InvalidArgument);
    }

    TEST_CASE("zero-noise labeled self-alignment in the plane") {
        Rng rng(2);
        const auto X = random_cfg("X", 8, 2, rng);
        PriorSpec pr;
        ChainSettings st = short_settings(4000, 3);
        st.labeled = true;
        const auto out = run_chain(X, X, pr, st);
        const auto sum = summarize(out);
        CHECK(sum.scales[0].median > 0.95);
        CHECK(sum.scales[0].median < 1.05);
        const Matrix& A = sum.mean_rotation.matrix();
        CHECK(std::abs(std::atan2(A(1, 0), A(0, 0))) < 0.05);
        for (const auto& s : out.samples) CHECK(s.pairs.size() == 8);
    }

    TEST_CASE("unlabeled synthetic recovery (small)") {
        // Y on [0, 2]^3 and X = c R Y + tau + noise; the cold start (A = I, M empty)
        // finds the matching when the two clouds overlap on this scale.
        Rng rng(4);
        const int m = 8;
        PointMatrix<double> y(m, 3);
        for (int i = 0; i < m; ++i)
            for (int a = 0; a < 3; ++a) y(i, a) = 2 * uniform01(rng);
        const Configuration Y("Y", y);
        const RotationMatrix R = random_rotation(3, rng);
        const double c = 0.7;
        const Vector tau{{1.0, -2.0, 0.5}};
        const std::vector<int> perm{3, 0, 6, 1, 7, 2, 5, 4};  // X row j pairs with Y row perm[j]
        PointMatrix<double> x(m, 3);
        for (int j = 0; j < m; ++j) {
            Vector p = c * (R.matrix() * Y.point(perm[j])) + tau;
            for (int a = 0; a < 3; ++a) p(a) += 0.02 * standard_normal(rng);
            x.row(j) = p.transpose();
        }
        const Configuration X("X", x);
        PriorSpec pr;
        pr.alpha = pr.beta = 0.001;
        pr.mu_tau = centroid(X) - centroid(Y);
        ChainSettings st = short_settings(20000, 5);
        const auto sum = summarize(run_chain(X, Y, pr, st));
        for (int j = 0; j < m; ++j) CHECK(sum.match_prob(j + 1, perm[j] + 1) > 0.9);
        CHECK(sum.scales[0].lo < c);
        CHECK(sum.scales[0].hi > c);
        const Matrix D = sum.mean_rotation.matrix().transpose() * R.matrix();
        CHECK(std::acos(std::clamp((D.trace() - 1) / 2, -1.0, 1.0)) < 5 * M_PI / 180);
    }

    TEST_CASE("frozen-parameter matching chain matches exact enumeration") {
        Rng rng(6);
        const auto X = random_cfg("X", 3, 2, rng, 1.0);
        const auto Y = random_cfg("Y", 3, 2, rng, 1.0);
        PriorSpec pr;
        pr.kappa = 2.0;
        ChainSettings st;
        st.order_constrained = true;
        st.match_moves = 1;
        Chain chain(X, Y, pr, st);
        ChainState s = chain.state();
        s.noise_vars = {0.8};
        s.rotation = rotation_from_euler<double>({0.4});
        s.translation = {Vector{{0.1, -0.2}}};
        chain.set_state(s);
        UpdateMask mask;
        mask.rotation = mask.translation = mask.noise = mask.scale = mask.labels = false;
        chain.set_mask(mask);

        std::map<std::vector<std::pair<int, int>>, double> exact;
        double z = 0;
        for (const auto& M : enumerate_matchings(3, 3, true)) {
            ChainState t = s;
            t.matching = M;
            const double w = std::exp(log_joint(t, X, Y, pr));
            exact[M.pairs()] = w;
            z += w;
        }
        std::map<std::vector<std::pair<int, int>>, long> visits;
        const long steps = 200000;
        Rng r2(7);
        for (long i = 0; i < steps; ++i) {
            chain.sweep(r2);
            ++visits[chain.state().matching.pairs()];
        }
        double tv = 0;
        for (const auto& [k, w] : exact) tv += std::abs(w / z - static_cast<double>(visits[k]) / steps);
        CHECK(0.5 * tv < 0.03);
    }

    TEST_CASE("scale update leaves the halfnormal-gamma conditional invariant") {
        Rng rng(8);
        const auto X = random_cfg("X", 5, 3, rng, 1.0);
        const auto Y = random_cfg("Y", 5, 3, rng, 1.0);
        PriorSpec pr;
        pr.alpha_c = 3;
        ChainSettings st;
        st.labeled = true;
        Chain chain(X, Y, pr, st);
        ChainState s = chain.state();
        s.noise_vars = {2.0};
        s.rotation = random_rotation(3, rng);
        chain.set_state(s);
        UpdateMask mask;
        mask.matching = mask.rotation = mask.translation = mask.noise = mask.labels = false;
        chain.set_mask(mask);
        const HngParams p = scale_conditional_params(chain.state(), X, Y, pr);
        Rng r2(9);
        std::vector<double> mh, exact;
        for (int i = 0; i < 1000; ++i) chain.sweep(r2);
        while (mh.size() < 100000) {
            for (int t = 0; t < 5; ++t) chain.sweep(r2);
            mh.push_back(chain.state().scales[0]);
        }
        HngExactSampler ex(p);
        for (int i = 0; i < 100000; ++i) exact.push_back(ex(r2));
        CHECK(oracle::ks_two_sample(mh, exact) < 0.02);
    }

    TEST_CASE("two-scale runs keep the ordering and label consistency") {
        Rng rng(10);
        const auto X = random_cfg("X", 6, 3, rng);
        const auto Y = random_cfg("Y", 7, 3, rng);
        PriorSpec pr;
        ChainSettings st = short_settings(3000, 11);
        st.n_scales = 2;
        st.order_constrained = true;
        const auto out = run_chain(X, Y, pr, st);
        for (const auto& s : out.samples) {
            CHECK(s.scales[1] > s.scales[0]);
            for (const auto& [j, k] : s.pairs) CHECK(s.labels_x[j] == s.labels_y[k]);
        }
        CHECK(out.acceptance.labels.proposed == 3000);
    }

    TEST_CASE("label switch move") {
        Rng rng(12);
        const auto X = random_cfg("X", 4, 2, rng);
        const auto Y = random_cfg("Y", 4, 2, rng);
        PriorSpec pr;
        ChainSettings st;
        const auto one = initial_state(X, Y, pr, st);
        CHECK_THROWS_AS(label_switch_move(one, X, Y, pr, rng), InvalidOperation);
        st.n_scales = 2;
        auto s = initial_state(X, Y, pr, st);
        s.matching = MatchingMatrix::from_pairs(4, 4, {{0, 0}, {1, 1}});
        for (int i = 0; i < 500; ++i) {
            s = label_switch_move(s, X, Y, pr, rng);
            for (const auto& [j, k] : s.matching.pairs()) CHECK(s.labels_x[j] == s.labels_y[k]);
        }
    }

    TEST_CASE("symmetric groups give uniform group occupancy across pairs") {
        // All pairs fixed and exchangeable: each pair's f0 is the same number.
        PointMatrix<double> p(4, 2);
        p << 1, 0, 0, 1, -1, 0, 0, -1;
        const Configuration X("X", p), Y("Y", p);
        PriorSpec pr;
        pr.translation_enabled = false;
        ChainSettings st = short_settings(60000, 13);
        st.labeled = true;
        st.n_scales = 2;
        const auto sum = summarize(run_chain(X, Y, pr, st));
        REQUIRE(sum.matches.size() == 4);
        double lo = 1, hi = 0;
        for (const auto& m : sum.matches) {
            lo = std::min(lo, *m.f0);
            hi = std::max(hi, *m.f0);
        }
        CHECK(hi - lo < 0.05);
    }

    TEST_CASE("labeled mode equals unlabeled mode with a frozen identity matching") {
        Rng rng(14);
        const auto X = random_cfg("X", 5, 3, rng);
        const auto Y = random_cfg("Y", 5, 3, rng);
        PriorSpec pr;
        ChainSettings a;
        a.labeled = true;
        ChainSettings b;
        Chain ca(X, Y, pr, a);
        Chain cb(X, Y, pr, b);
        ChainState s = cb.state();
        s.matching = MatchingMatrix::identity(5);
        cb.set_state(s);
        UpdateMask mask;
        mask.matching = false;
        mask.labels = false;
        cb.set_mask(mask);
        Rng ra(15), rb(15);
        bool same = true;
        for (int i = 0; i < 500; ++i) {
            ca.sweep(ra);
            cb.sweep(rb);
            same = same && ca.log_posterior() == cb.log_posterior();
        }
        CHECK(same);
    }

    TEST_CASE("runs are bit-reproducible") {
        Rng rng(16);
        const auto X = random_cfg("X", 5, 3, rng);
        const auto Y = random_cfg("Y", 6, 3, rng);
        PriorSpec pr;
        ChainSettings st = short_settings(2000, 17);
        st.n_scales = 2;
        std::ostringstream t1, t2;
        write_trace(t1, run_chain(X, Y, pr, st));
        write_trace(t2, run_chain(X, Y, pr, st));
        CHECK(t1.str() == t2.str());
        st.seed = 18;
        std::ostringstream t3;
        write_trace(t3, run_chain(X, Y, pr, st));
        CHECK(t1.str() != t3.str());
    }

    TEST_CASE("summaries") {
        ChainOutput out;
        out.dim = 2;
        out.m = 2;
        out.n = 2;
        Sample s;
        s.rotation = Matrix::Identity(2, 2);
        s.translation = {Vector::Zero(2)};
        s.scales = {1.0};
        s.noise_vars = {1.0};
        s.pairs = {{0, 1}};
        out.samples = {s, s, s};
        auto sum = summarize(out);
        CHECK(sum.match_prob(1, 2) == 1.0);
        CHECK(sum.match_prob(2, 1) == 0.0);
        CHECK(sum.scales[0].lo == sum.scales[0].hi);
        CHECK(sum.L_posterior.at(1) == 1.0);

        out.samples = {s, s};
        out.samples[1].scales = {3.0};
        CHECK(summarize(out).scales[0].median == 2.0);
        CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
        CHECK(quantile({1, 2, 3, 4, 5}, 0.5) == 3.0);
        CHECK(quantile({5, 1}, 0.0) == 1.0);
        CHECK(quantile({5, 1}, 1.0) == 5.0);
        out.samples.clear();
        CHECK_THROWS_AS(summarize(out), InvalidArgument);
    }

    TEST_CASE("duplicate merge leaves the summary unchanged") {
        Rng rng(19);
        const auto X = random_cfg("X", 5, 2, rng);
        const auto Y = random_cfg("Y", 5, 2, rng);
        PriorSpec pr;
        const auto out = run_chain(X, Y, pr, short_settings(3000, 20));
        const auto a = summarize(out);
        const auto b = summarize(merge_chains({out, out}));
        REQUIRE(a.matches.size() == b.matches.size());
        for (std::size_t i = 0; i < a.matches.size(); ++i) CHECK(a.matches[i].prob == b.matches[i].prob);
        CHECK(a.scales[0].median == b.scales[0].median);
        CHECK(a.scales[0].lo == b.scales[0].lo);
        CHECK(a.scales[0].hi == b.scales[0].hi);
        CHECK((a.mean_rotation.matrix() - b.mean_rotation.matrix()).norm() < 1e-12);
    }

    TEST_CASE("matching posterior is invariant to a similarity transform of Y") {
        Rng rng(21);
        const auto X = random_cfg("X", 6, 3, rng, 1.0);
        PointMatrix<double> y(6, 3);
        for (int j = 0; j < 6; ++j) {
            for (int a = 0; a < 3; ++a) y(5 - j, a) = X.points()(j, a) + 0.25 * standard_normal(rng);
        }
        const Configuration Y("Y", y);
        const SimilarityTransform T(rotation_from_euler<double>({0.8, -0.4, 2.0}), Vector{{5.0, -3.0, 1.0}}, 1.0);
        const Configuration Yt = apply_similarity(Y, T);
        PriorSpec pr;
        pr.kappa = 0.5;
        auto probs = [&](const Configuration& yy) {
            std::vector<std::vector<double>> p(5);
            for (int r = 0; r < 5; ++r) {
                const auto sum = summarize(run_chain(X, yy, pr, short_settings(6000, 100 + r)));
                for (int j = 1; j <= 6; ++j) p[r].push_back(sum.match_prob(j, 7 - j));
            }
            return p;
        };
        const auto a = probs(Y), b = probs(Yt);
        for (int j = 0; j < 6; ++j) {
            double ma = 0, mb = 0, va = 0, vb = 0;
            for (int r = 0; r < 5; ++r) {
                ma += a[r][j] / 5;
                mb += b[r][j] / 5;
            }
            for (int r = 0; r < 5; ++r) {
                va += (a[r][j] - ma) * (a[r][j] - ma) / 4;
                vb += (b[r][j] - mb) * (b[r][j] - mb) / 4;
            }
            const double se = std::sqrt(va / 5 + vb / 5);
            CHECK(std::abs(ma - mb) <= 3 * se);
        }
    }
}
