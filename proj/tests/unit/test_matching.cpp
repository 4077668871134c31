#include "doctest.h"

#include <map>
#include <set>

#include "oracles.hpp"
#include "simalign/errors.hpp"
#include "simalign/matching.hpp"

using namespace simalign;

namespace {

std::set<std::vector<std::pair<int, int>>> as_set(const std::vector<MatchingMatrix>& ms) {
    std::set<std::vector<std::pair<int, int>>> out;
    for (const auto& m : ms) out.insert(m.pairs());
    return out;
}

}  // namespace

TEST_SUITE("matching") {
    TEST_CASE("matching invariants") {
        MatchingMatrix M(3, 2);
        M.add(0, 1);
        CHECK(M.size() == 1);
        CHECK(M.partner_of_x(0) == 1);
        CHECK(M.partner_of_y(1) == 0);
        CHECK_THROWS_AS(M.add(1, 1), InvalidArgument);
        CHECK_THROWS_AS(M.add(0, 0), InvalidArgument);
        CHECK_THROWS_AS(M.add(3, 0), InvalidArgument);
        M.remove_x(0);
        CHECK(M.size() == 0);
        CHECK(MatchingMatrix::identity(4).size() == 4);
    }

    TEST_CASE("order preservation examples") {
        CHECK(is_order_preserving(MatchingMatrix(2, 2)));
        CHECK(is_order_preserving(MatchingMatrix::from_pairs(2, 2, {{0, 0}, {1, 1}})));
        CHECK_FALSE(is_order_preserving(MatchingMatrix::from_pairs(2, 2, {{0, 1}, {1, 0}})));
        CHECK(is_order_preserving(MatchingMatrix::from_pairs(5, 5, {{0, 0}, {1, 3}, {2, 4}})));
    }

    TEST_CASE("enumeration counts") {
        CHECK(enumerate_matchings(1, 1, false).size() == 2);
        const auto two = enumerate_matchings(2, 2, true);
        CHECK(as_set(two) == std::set<std::vector<std::pair<int, int>>>{
                                 {}, {{0, 0}}, {{0, 1}}, {{1, 0}}, {{1, 1}}, {{0, 0}, {1, 1}}});
        CHECK(enumerate_matchings(2, 2, false).size() == 7);
        // sum over L of C(m, L) C(n, L)
        CHECK(enumerate_matchings(2, 3, true).size() == 10);
        CHECK(enumerate_matchings(3, 3, true).size() == 20);
        CHECK(enumerate_matchings(3, 3, false).size() == 34);
        CHECK_THROWS_AS(enumerate_matchings(3, 7, false), InvalidArgument);
    }

    TEST_CASE("enumeration agrees with a brute-force scan") {
        for (int m = 0; m <= 4; ++m) {
            for (int n = 0; n <= 5; ++n) {
                if (m * n > 20) continue;
                for (bool c : {false, true}) {
                    const auto got = enumerate_matchings(m, n, c);
                    const auto want = oracle::brute_force_matchings(m, n, c);
                    CHECK(got.size() == want.size());
                    CHECK(as_set(got) == std::set<std::vector<std::pair<int, int>>>(want.begin(), want.end()));
                }
            }
        }
    }

    TEST_CASE("single-point move") {
        Rng rng(1);
        const MatchingMatrix M(1, 1);
        for (int i = 0; i < 20; ++i) {
            const auto mv = propose_match_move(M, true, rng);
            CHECK(mv.kind == MatchMoveKind::add);
            CHECK(mv.proposal.contains(0, 0));
        }
        const MatchingMatrix full = MatchingMatrix::identity(2);
        for (int i = 0; i < 50; ++i) {
            const auto mv = propose_match_move(full, true, rng);
            CHECK((mv.kind == MatchMoveKind::remove || mv.kind == MatchMoveKind::none));
            if (mv.kind == MatchMoveKind::none) {
                CHECK(mv.proposal == full);
                CHECK(mv.log_proposal_ratio == 0.0);
            }
        }
        const auto empty = propose_match_move(MatchingMatrix(0, 3), false, rng);
        CHECK(empty.kind == MatchMoveKind::none);
    }

    TEST_CASE("proposals stay valid and the support is symmetric") {
        for (bool constrained : {false, true}) {
            for (auto [m, n] : {std::pair{3, 3}, std::pair{2, 3}, std::pair{3, 2}}) {
                Rng rng(2);
                std::map<std::vector<std::pair<int, int>>, std::set<std::vector<std::pair<int, int>>>> reach;
                for (const auto& M : enumerate_matchings(m, n, constrained)) {
                    auto& out = reach[M.pairs()];
                    for (int i = 0; i < 400; ++i) {
                        const auto mv = propose_match_move(M, constrained, rng);
                        if (mv.kind == MatchMoveKind::none) continue;
                        CHECK(std::abs(mv.proposal.size() - M.size()) <= 1);
                        if (constrained) CHECK(is_order_preserving(mv.proposal));
                        out.insert(mv.proposal.pairs());
                    }
                }
                for (const auto& [from, tos] : reach) {
                    for (const auto& to : tos) CHECK(reach.at(to).count(from) == 1);
                }
            }
        }
    }

    TEST_CASE("proposal ratios match empirical proposal frequencies") {
        // q(M'|M) estimated by counting; compare exp(ratio) with q(M|M')/q(M'|M).
        Rng rng(3);
        const auto states = enumerate_matchings(2, 3, true);
        std::map<std::pair<std::vector<std::pair<int, int>>, std::vector<std::pair<int, int>>>, double> q;
        std::map<std::pair<std::vector<std::pair<int, int>>, std::vector<std::pair<int, int>>>, double> ratio;
        const int draws = 200000;
        for (const auto& M : states) {
            for (int i = 0; i < draws; ++i) {
                const auto mv = propose_match_move(M, true, rng);
                if (mv.kind == MatchMoveKind::none) continue;
                q[{M.pairs(), mv.proposal.pairs()}] += 1.0 / draws;
                ratio[{M.pairs(), mv.proposal.pairs()}] = mv.log_proposal_ratio;
            }
        }
        for (const auto& [key, fwd] : q) {
            const double back = q.at({key.second, key.first});
            CHECK(std::exp(ratio.at(key)) == doctest::Approx(back / fwd).epsilon(0.05));
        }
    }

    TEST_CASE("uniform target gives uniform occupancy") {
        Rng rng(4);
        const auto states = enumerate_matchings(3, 3, true);
        std::map<std::vector<std::pair<int, int>>, long> visits;
        MatchingMatrix M(3, 3);
        const long steps = 1000000;
        for (long i = 0; i < steps; ++i) {
            const auto mv = propose_match_move(M, true, rng);
            if (mv.kind != MatchMoveKind::none &&
                (mv.log_proposal_ratio >= 0 || std::log(uniform01(rng)) < mv.log_proposal_ratio)) {
                M = mv.proposal;
            }
            ++visits[M.pairs()];
        }
        CHECK(visits.size() == states.size());
        for (const auto& s : states) {
            CHECK(std::abs(static_cast<double>(visits[s.pairs()]) / steps - 1.0 / states.size()) < 0.01);
        }
    }

    TEST_CASE("pair filter restricts partners") {
        MatchingMatrix M(3, 3);
        const PairFilter same_parity = [](int j, int k) { return (j % 2) == (k % 2); };
        CHECK(legal_partners(M, 0, false, same_parity) == std::vector<int>{0, 2});
        CHECK(legal_partners(M, 1, false, same_parity) == std::vector<int>{1});
        M.add(1, 1);
        CHECK(legal_partners(M, 0, true, same_parity) == std::vector<int>{0});
        CHECK(legal_partners(M, 2, true, same_parity) == std::vector<int>{2});
        CHECK(legal_partners(M, 1, true) == std::vector<int>{0, 1, 2});
    }
}
