#pragma once

#include "ultrabase/core.hpp"

#include <stdexcept>
#include <variant>

namespace ultrabase {

struct NearestSet {
    PointSet points; // every z != x at minimum distance from x
    Rank distance;
};

/// z != x minimizing d(x, z). A finite space always attains the minimum.
inline NearestSet nearest_set(const UltrametricSpace& space, Point x) {
    NearestSet out{{}, kInfiniteRank};
    for (Point z = 0; z < space.size(); ++z) {
        if (z == x) {
            continue;
        }
        const Rank r = space.rank(x, z);
        if (r < out.distance) {
            out.distance = r;
            out.points.clear();
        }
        if (r == out.distance) {
            out.points.push_back(z);
        }
    }
    out.points = space.sort_by_label(std::move(out.points));
    return out;
}

struct Partnered {
    PointSet partners;
};

struct Pseudopartnered {
    PointSet nearest;
    Rank min_distance;
};

/// Minimum not attained. Cannot happen in a finite space; kept so the classification
/// mirrors the full trichotomy.
struct Unpartnered {};

using PointClass = std::variant<Partnered, Pseudopartnered, Unpartnered>;

/// x and y are partners iff d(x,y) is the minimum distance from x and also from y.
inline bool are_partners(const UltrametricSpace& space, Point x, Point y) {
    if (x == y) {
        return false;
    }
    const Rank d = space.rank(x, y);
    return nearest_set(space, x).distance == d && nearest_set(space, y).distance == d;
}

inline PointClass classify_point(const UltrametricSpace& space, Point x) {
    auto near = nearest_set(space, x);
    if (near.points.empty()) {
        throw std::logic_error("finite space produced an unpartnered point");
    }
    PointSet partners;
    for (Point y : near.points) {
        if (nearest_set(space, y).distance == near.distance) {
            partners.push_back(y);
        }
    }
    if (!partners.empty()) {
        return Partnered{std::move(partners)};
    }
    return Pseudopartnered{std::move(near.points), near.distance};
}

inline bool is_partnered(const PointClass& c) { return std::holds_alternative<Partnered>(c); }

struct PartnerPartition {
    /// Equivalence classes of the partner relation, each sorted by label, ordered by
    /// their first label.
    std::vector<PointSet> classes;
    PointSet pseudopartnered;
    PointSet unpartnered; // always empty for a finite space

    /// P(X): every partnered point, sorted by label.
    PointSet partnered(const UltrametricSpace& space) const {
        PointSet all;
        for (const auto& c : classes) {
            all.insert(all.end(), c.begin(), c.end());
        }
        return space.sort_by_label(std::move(all));
    }
};

inline PartnerPartition partner_partition(const UltrametricSpace& space) {
    const std::size_t n = space.size();
    std::vector<Rank> min_dist(n);
    for (Point x = 0; x < n; ++x) {
        min_dist[x] = nearest_set(space, x).distance;
    }
    PartnerPartition out;
    std::vector<bool> placed(n, false);
    for (Point x : space.all_points()) {
        if (placed[x]) {
            continue;
        }
        PointSet cls{x};
        for (Point y = 0; y < n; ++y) {
            if (y != x && space.rank(x, y) == min_dist[x] && min_dist[y] == min_dist[x]) {
                cls.push_back(y);
            }
        }
        if (cls.size() == 1) {
            out.pseudopartnered.push_back(x);
            placed[x] = true;
            continue;
        }
        for (Point y : cls) {
            placed[y] = true;
        }
        out.classes.push_back(space.sort_by_label(std::move(cls)));
    }
    return out;
}

struct TraceStep {
    Point point;
    Rank distance; // kInfiniteRank for the first step
};

/**
 * Greedy nearest-point descent from a start point.
 *
 * steps[0] = (start, inf). While the open ball B_{d_n}(x_n) has more than one point,
 * the next point is the smallest-label minimizer of d(x_n, .) inside it and
 * d_{n+1} is that minimum. The sequence then continues as (terminal, 0) forever;
 * that stationary tail is not stored.
 */
struct PseudopartneringTrace {
    std::vector<TraceStep> steps;
    Point terminal;
    PointClass terminal_class;
};

inline PseudopartneringTrace pseudopartnering_trace(const UltrametricSpace& space, Point start) {
    if (start >= space.size()) {
        throw InputError("trace start out of range");
    }
    PseudopartneringTrace out{{{start, kInfiniteRank}}, start, Unpartnered{}};
    while (true) {
        const TraceStep current = out.steps.back();
        std::optional<Point> best;
        Rank best_rank = kInfiniteRank;
        for (Point z = 0; z < space.size(); ++z) {
            const Rank r = space.rank(current.point, z);
            if (z == current.point || r >= current.distance) {
                continue;
            }
            if (!best || r < best_rank || (r == best_rank && space.label_less(z, *best))) {
                best = z;
                best_rank = r;
            }
        }
        if (!best) {
            break;
        }
        if (out.steps.size() >= space.size()) {
            throw std::logic_error("pseudopartnering trace exceeded the number of points");
        }
        out.steps.push_back({*best, best_rank});
    }
    out.terminal = out.steps.back().point;
    out.terminal_class = classify_point(space, out.terminal);
    return out;
}

} // namespace ultrabase
