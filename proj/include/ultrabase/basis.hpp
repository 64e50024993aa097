#pragma once

#include "ultrabase/core.hpp"
#include "ultrabase/partner.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <utility>

namespace ultrabase {

using BigCount = boost::multiprecision::cpp_int;

/// z distinguishes x and y when d(x,z) != d(y,z).
inline bool distinguishes(const UltrametricSpace& space, Point z, Point x, Point y) {
    if (x == y) {
        throw InputError("distinguishes needs two different points");
    }
    return space.rank(x, z) != space.rank(y, z);
}

/// Every z distinguishing x and y. Always contains x and y.
inline PointSet distinguishers(const UltrametricSpace& space, Point x, Point y) {
    if (x == y) {
        throw InputError("distinguishers needs two different points");
    }
    PointSet out;
    for (Point z : space.all_points()) {
        if (space.rank(x, z) != space.rank(y, z)) {
            out.push_back(z);
        }
    }
    return out;
}

struct GeneratorCheck {
    bool ok = true;
    /// First pair (in label order) with fewer than k distinguishers in S.
    std::optional<std::pair<Point, Point>> witness;
    std::size_t witness_count = 0; // distinguishers of the witness inside S
};

/// True iff every pair of distinct points has at least k distinguishers in S.
/// Pairs are visited in lexicographic label order, so the witness is deterministic.
inline GeneratorCheck is_k_generator(const UltrametricSpace& space, std::span<const Point> landmarks,
                                     std::size_t k) {
    if (k == 0) {
        throw InputError("k must be at least 1");
    }
    for (Point s : landmarks) {
        if (s >= space.size()) {
            throw InputError("landmark out of range");
        }
    }
    const PointSet set = space.sort_by_label(PointSet(landmarks.begin(), landmarks.end()));
    const PointSet order = space.all_points();
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const Point x = order[i], y = order[j];
            std::size_t count = 0;
            for (Point s : set) {
                if (space.rank(x, s) != space.rank(y, s) && ++count >= k) {
                    break;
                }
            }
            if (count < k) {
                return {false, std::pair{x, y}, count};
            }
        }
    }
    return {};
}

/**
 * Every metric basis of a finite ultrametric space, in product form.
 *
 * A set is a metric basis iff it is the union, over the partner classes, of the class
 * with exactly one element removed. The family is never materialized; use
 * BasisEnumerator to walk it.
 */
struct BasisFamily {
    std::vector<PointSet> classes;

    /// P(X). Each basis is this set minus one element per class.
    PointSet core(const UltrametricSpace& space) const {
        PointSet all;
        for (const auto& c : classes) {
            all.insert(all.end(), c.begin(), c.end());
        }
        return space.sort_by_label(std::move(all));
    }

    std::size_t dimension() const {
        std::size_t dim = 0;
        for (const auto& c : classes) {
            dim += c.size() - 1;
        }
        return dim;
    }

    BigCount count() const {
        BigCount total = 1;
        for (const auto& c : classes) {
            total *= c.size();
        }
        return total;
    }

    /// The basis obtained by dropping the given element (by position) from each class.
    PointSet select(const UltrametricSpace& space, std::span<const std::size_t> dropped) const {
        PointSet out;
        for (std::size_t i = 0; i < classes.size(); ++i) {
            for (std::size_t j = 0; j < classes[i].size(); ++j) {
                if (j != dropped[i]) {
                    out.push_back(classes[i][j]);
                }
            }
        }
        return space.sort_by_label(std::move(out));
    }
};

/// Lazy walk over a BasisFamily. The first basis drops the last-labelled element of
/// every class, which makes it the lexicographically smallest basis.
class BasisEnumerator {
  public:
    static constexpr std::size_t kDefaultCap = 10'000;

    BasisEnumerator(const UltrametricSpace& space, const BasisFamily& family, std::size_t cap = kDefaultCap)
        : space_(&space), family_(&family), cap_(cap) {
        for (const auto& c : family.classes) {
            dropped_.push_back(c.size() - 1);
        }
    }

    std::optional<PointSet> next() {
        if (done_ || produced_ >= cap_) {
            return std::nullopt;
        }
        PointSet out = family_->select(*space_, dropped_);
        ++produced_;
        advance();
        return out;
    }

    std::size_t produced() const { return produced_; }

  private:
    // Odometer counting down, last class fastest.
    void advance() {
        for (std::size_t i = dropped_.size(); i-- > 0;) {
            if (dropped_[i] > 0) {
                --dropped_[i];
                return;
            }
            dropped_[i] = family_->classes[i].size() - 1;
        }
        done_ = true;
    }

    const UltrametricSpace* space_;
    const BasisFamily* family_;
    std::size_t cap_;
    std::vector<std::size_t> dropped_;
    std::size_t produced_ = 0;
    bool done_ = false;
};

inline BasisFamily metric_bases(const UltrametricSpace& space) {
    return BasisFamily{partner_partition(space).classes};
}

inline std::vector<PointSet> enumerate_bases(const UltrametricSpace& space, const BasisFamily& family,
                                             std::size_t cap = BasisEnumerator::kDefaultCap) {
    std::vector<PointSet> out;
    BasisEnumerator it(space, family, cap);
    while (auto b = it.next()) {
        out.push_back(std::move(*b));
    }
    return out;
}

/// P(X), the unique 2-metric basis.
inline PointSet two_metric_basis(const UltrametricSpace& space) {
    return partner_partition(space).partnered(space);
}

struct DimensionReport {
    std::size_t dim1;
    std::size_t dim2;
    std::size_t Dim; // largest k with a k-metric basis; always 2 for finite spaces
    std::size_t n;
};

inline DimensionReport dimensions(const UltrametricSpace& space) {
    const auto partition = partner_partition(space);
    const BasisFamily family{partition.classes};
    return {family.dimension(), partition.partnered(space).size(), 2, space.size()};
}

struct BasisCheck {
    bool ok = true;
    std::string reason;
    std::optional<std::pair<Point, Point>> witness; // undistinguished pair, if any
};

/// S is a metric basis iff it generates and has dim1 elements.
inline BasisCheck check_metric_basis(const UltrametricSpace& space, std::span<const Point> landmarks) {
    const PointSet set = space.sort_by_label(PointSet(landmarks.begin(), landmarks.end()));
    auto gen = is_k_generator(space, set, 1);
    if (!gen.ok) {
        const auto [x, y] = *gen.witness;
        return {false, "pair (" + space.label(x) + "," + space.label(y) + ") is not distinguished", gen.witness};
    }
    const auto family = metric_bases(space);
    if (set.size() != family.dimension()) {
        return {false,
                "generator has " + std::to_string(set.size()) + " points but dim1 is " +
                    std::to_string(family.dimension()),
                std::nullopt};
    }
    return {};
}

/// Restriction of the space to P(X), the unique minimal subspace having S as a metric
/// basis. Throws DomainError when S is not a metric basis.
inline UltrametricSpace minimal_subspace(const UltrametricSpace& space, std::span<const Point> landmarks) {
    auto check = check_metric_basis(space, landmarks);
    if (!check.ok) {
        throw DomainError("not a metric basis: " + check.reason);
    }
    return space.restrict(two_metric_basis(space));
}

struct SubspaceCheck {
    bool predicted; // P(X) is contained in X'
    bool direct;    // S generates X' and |S| == dim1(X')

    bool agree() const { return predicted == direct; }
};

/**
 * Whether S stays a metric basis of the subspace X'.
 *
 * `predicted` is the containment test P(X) within X'. `direct` restricts the space to
 * X' and checks S there. The two can disagree: if a partner class {a, b} loses a
 * and b finds a new partner inside X', S may still be a basis of X'
 * (e.g. 1/min on {1,2,3,4}, S = {3}, X' = {2,3}).
 */
inline SubspaceCheck is_basis_of_subspace(const UltrametricSpace& space, std::span<const Point> landmarks,
                                          std::span<const Point> subspace) {
    const PointSet sub = space.sort_by_label(PointSet(subspace.begin(), subspace.end()));
    const PointSet set = space.sort_by_label(PointSet(landmarks.begin(), landmarks.end()));
    for (Point s : set) {
        if (std::find(sub.begin(), sub.end(), s) == sub.end()) {
            throw InputError("landmark '" + space.label(s) + "' is not in the subspace");
        }
    }
    auto check = check_metric_basis(space, set);
    if (!check.ok) {
        throw DomainError("not a metric basis: " + check.reason);
    }
    bool predicted = true;
    for (Point p : two_metric_basis(space)) {
        predicted = predicted && std::find(sub.begin(), sub.end(), p) != sub.end();
    }
    const auto restricted = space.restrict(sub);
    PointSet mapped;
    for (Point s : set) {
        mapped.push_back(restricted.at(space.label(s)));
    }
    return {predicted, check_metric_basis(restricted, mapped).ok};
}

} // namespace ultrabase
