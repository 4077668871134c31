#pragma once

// Partial one-to-one correspondences between the m points of X and the n
// points of Y, and the Metropolis-Hastings proposal moves over them.
// Indices are 0-based in code; files and reports use 1-based (j, k).

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "simalign/rng.hpp"

namespace simalign {

class MatchingMatrix {
public:
    MatchingMatrix() = default;
    MatchingMatrix(int m, int n);

    /// Throws InvalidArgument if a row or column would be used twice.
    static MatchingMatrix from_pairs(int m, int n, const std::vector<std::pair<int, int>>& pairs);
    /// {(j, j)}: the labeled-landmark case.
    static MatchingMatrix identity(int m);

    int rows() const noexcept { return static_cast<int>(x_to_y_.size()); }
    int cols() const noexcept { return static_cast<int>(y_to_x_.size()); }
    int size() const noexcept { return matched_; }

    /// Partner of x_j, or -1.
    int partner_of_x(int j) const { return x_to_y_.at(j); }
    /// Partner of y_k, or -1.
    int partner_of_y(int k) const { return y_to_x_.at(k); }
    bool contains(int j, int k) const { return partner_of_x(j) == k; }

    void add(int j, int k);
    void remove_x(int j);

    /// Pairs sorted by j.
    std::vector<std::pair<int, int>> pairs() const;

    friend bool operator==(const MatchingMatrix& a, const MatchingMatrix& b) {
        return a.x_to_y_ == b.x_to_y_ && a.y_to_x_ == b.y_to_x_;
    }
    friend bool operator<(const MatchingMatrix& a, const MatchingMatrix& b) {
        return a.x_to_y_ != b.x_to_y_ ? a.x_to_y_ < b.x_to_y_ : a.y_to_x_ < b.y_to_x_;
    }

private:
    std::vector<int> x_to_y_;
    std::vector<int> y_to_x_;
    int matched_{0};
};

/// j < j' implies k < k' for every two pairs.
bool is_order_preserving(const MatchingMatrix& M);

/// Extra admissibility rule for a pair (e.g. equal group labels).
using PairFilter = std::function<bool(int j, int k)>;

/// Y-partners x_j could take given the other pairs of M (x_j's own pair is
/// ignored): unmatched, passing `filter`, and order-compatible if requested.
std::vector<int> legal_partners(const MatchingMatrix& M, int j, bool order_constrained,
                                const PairFilter& filter = nullptr);

enum class MatchMoveKind { none, add, remove, switch_partner };

struct MatchMove {
    MatchingMatrix proposal;
    double log_proposal_ratio{0};  // ln q(M | M') - ln q(M' | M)
    MatchMoveKind kind{MatchMoveKind::none};
};

/// Pick j uniformly. Unmatched: pair it with a uniformly chosen legal y.
/// Matched: with probability 1/2 delete its pair, else move it to a uniformly
/// chosen legal alternative. Returns kind none (M unchanged, ratio 0) when no
/// legal move exists for the chosen j.
MatchMove propose_match_move(const MatchingMatrix& M, bool order_constrained, Rng& rng,
                             const PairFilter& filter = nullptr);

/// Exhaustive list of valid matchings; requires m * n <= 20.
std::vector<MatchingMatrix> enumerate_matchings(int m, int n, bool order_constrained);

}  // namespace simalign
