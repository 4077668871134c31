#include "simalign/matching.hpp"

#include <cmath>
#include <string>

#include "simalign/errors.hpp"

namespace simalign {

MatchingMatrix::MatchingMatrix(int m, int n) {
    if (m < 0 || n < 0) throw InvalidArgument("matching dimensions must be nonnegative");
    x_to_y_.assign(static_cast<std::size_t>(m), -1);
    y_to_x_.assign(static_cast<std::size_t>(n), -1);
}

MatchingMatrix MatchingMatrix::from_pairs(int m, int n, const std::vector<std::pair<int, int>>& pairs) {
    MatchingMatrix M(m, n);
    for (const auto& [j, k] : pairs) M.add(j, k);
    return M;
}

MatchingMatrix MatchingMatrix::identity(int m) {
    MatchingMatrix M(m, m);
    for (int j = 0; j < m; ++j) M.add(j, j);
    return M;
}

void MatchingMatrix::add(int j, int k) {
    if (j < 0 || j >= rows() || k < 0 || k >= cols()) {
        throw InvalidArgument("matching pair (" + std::to_string(j + 1) + "," + std::to_string(k + 1) +
                              ") out of range");
    }
    if (x_to_y_[j] != -1 || y_to_x_[k] != -1) {
        throw InvalidArgument("matching pair (" + std::to_string(j + 1) + "," + std::to_string(k + 1) +
                              ") reuses a matched point");
    }
    x_to_y_[j] = k;
    y_to_x_[k] = j;
    ++matched_;
}

void MatchingMatrix::remove_x(int j) {
    const int k = x_to_y_.at(j);
    if (k == -1) return;
    x_to_y_[j] = -1;
    y_to_x_[k] = -1;
    --matched_;
}

std::vector<std::pair<int, int>> MatchingMatrix::pairs() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(matched_));
    for (int j = 0; j < rows(); ++j) {
        if (x_to_y_[j] != -1) out.emplace_back(j, x_to_y_[j]);
    }
    return out;
}

bool is_order_preserving(const MatchingMatrix& M) {
    int last_k = -1;
    for (const auto& [j, k] : M.pairs()) {
        if (k <= last_k) return false;
        last_k = k;
    }
    return true;
}

std::vector<int> legal_partners(const MatchingMatrix& M, int j, bool order_constrained, const PairFilter& filter) {
    int k_lo = -1, k_hi = M.cols();
    if (order_constrained) {
        for (int jj = j - 1; jj >= 0; --jj) {
            if (M.partner_of_x(jj) != -1) {
                k_lo = M.partner_of_x(jj);
                break;
            }
        }
        for (int jj = j + 1; jj < M.rows(); ++jj) {
            if (M.partner_of_x(jj) != -1) {
                k_hi = M.partner_of_x(jj);
                break;
            }
        }
    }
    std::vector<int> out;
    for (int k = k_lo + 1; k < k_hi; ++k) {
        const int owner = M.partner_of_y(k);
        if (owner != -1 && owner != j) continue;
        if (filter && !filter(j, k)) continue;
        out.push_back(k);
    }
    return out;
}

MatchMove propose_match_move(const MatchingMatrix& M, bool order_constrained, Rng& rng, const PairFilter& filter) {
    MatchMove move{M, 0.0, MatchMoveKind::none};
    if (M.rows() == 0 || M.cols() == 0) return move;

    const int j = std::uniform_int_distribution<int>(0, M.rows() - 1)(rng);
    const int current = M.partner_of_x(j);

    if (current == -1) {
        const auto candidates = legal_partners(M, j, order_constrained, filter);
        if (candidates.empty()) return move;
        const int k = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
        move.proposal.add(j, k);
        move.kind = MatchMoveKind::add;
        // forward: 1/m * 1/|K| ; reverse (delete): 1/m * 1/2
        move.log_proposal_ratio = std::log(static_cast<double>(candidates.size()) / 2.0);
        return move;
    }

    // Candidates for x_j once its own pair is gone; always contains `current`.
    const auto candidates = legal_partners(M, j, order_constrained, filter);
    if (uniform01(rng) < 0.5) {
        move.proposal.remove_x(j);
        move.kind = MatchMoveKind::remove;
        // forward: 1/m * 1/2 ; reverse (add): 1/m * 1/|K'|
        move.log_proposal_ratio = std::log(2.0 / static_cast<double>(candidates.size()));
        return move;
    }

    std::vector<int> alternatives;
    for (int k : candidates) {
        if (k != current) alternatives.push_back(k);
    }
    if (alternatives.empty()) return move;
    const int k = alternatives[std::uniform_int_distribution<std::size_t>(0, alternatives.size() - 1)(rng)];
    move.proposal.remove_x(j);
    move.proposal.add(j, k);
    move.kind = MatchMoveKind::switch_partner;
    // The legal set for x_j does not depend on which partner it holds, so the
    // reverse switch has the same number of alternatives: ratio 1.
    move.log_proposal_ratio = 0.0;
    return move;
}

namespace {

void enumerate_from(int j, bool order_constrained, MatchingMatrix& current, std::vector<MatchingMatrix>& out) {
    if (j == current.rows()) {
        out.push_back(current);
        return;
    }
    enumerate_from(j + 1, order_constrained, current, out);
    int k_lo = 0;
    if (order_constrained) {
        for (int jj = j - 1; jj >= 0; --jj) {
            if (current.partner_of_x(jj) != -1) {
                k_lo = current.partner_of_x(jj) + 1;
                break;
            }
        }
    }
    for (int k = k_lo; k < current.cols(); ++k) {
        if (current.partner_of_y(k) != -1) continue;
        current.add(j, k);
        enumerate_from(j + 1, order_constrained, current, out);
        current.remove_x(j);
    }
}

}  // namespace

std::vector<MatchingMatrix> enumerate_matchings(int m, int n, bool order_constrained) {
    if (m < 0 || n < 0 || m * n > 20) throw InvalidArgument("enumerate_matchings: requires m * n <= 20");
    std::vector<MatchingMatrix> out;
    MatchingMatrix current(m, n);
    enumerate_from(0, order_constrained, current, out);
    return out;
}

}  // namespace simalign
