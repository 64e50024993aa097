#pragma once

#include "ultrabase/decimal.hpp"
#include "ultrabase/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ultrabase {

/// Index of a distance in a DistanceTable. 0 is the zero distance; 1..size() are
/// the table entries in increasing order.
using Rank = std::uint32_t;

inline constexpr Rank kZeroRank = 0;
/// Stands for an infinite radius. Compares above every table rank.
inline constexpr Rank kInfiniteRank = std::numeric_limits<Rank>::max();

/// Index of a point inside one UltrametricSpace.
using Point = std::size_t;

/// Points kept sorted by label (see UltrametricSpace::sort_by_label).
using PointSet = std::vector<Point>;

/// Strictly increasing positive distance magnitudes, each with the decimal text it
/// was ingested from.
class DistanceTable {
  public:
    DistanceTable() = default;
    DistanceTable(std::vector<double> values, std::vector<std::string> texts)
        : values_(std::move(values)), texts_(std::move(texts)) {
        if (values_.size() != texts_.size()) {
            throw InputError("distance table: values and texts differ in length");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!(values_[i] > 0.0) || (i > 0 && !(values_[i - 1] < values_[i]))) {
                throw InputError("distance table must be strictly increasing and positive");
            }
        }
    }

    std::size_t size() const { return values_.size(); }

    double value(Rank r) const {
        if (r == kZeroRank) {
            return 0.0;
        }
        if (r == kInfiniteRank) {
            return std::numeric_limits<double>::infinity();
        }
        return values_.at(r - 1);
    }

    const std::string& text(Rank r) const {
        static const std::string kZero = "0";
        static const std::string kInf = "inf";
        if (r == kZeroRank) {
            return kZero;
        }
        if (r == kInfiniteRank) {
            return kInf;
        }
        return texts_.at(r - 1);
    }

    std::span<const double> values() const { return values_; }
    std::span<const std::string> texts() const { return texts_; }

    /// Smallest rank whose value is >= v (size()+1 when every value is below v).
    Rank lower_rank(double v) const {
        if (v <= 0.0) {
            return kZeroRank;
        }
        auto it = std::lower_bound(values_.begin(), values_.end(), v);
        return static_cast<Rank>(it - values_.begin()) + 1;
    }

    friend bool operator==(const DistanceTable&, const DistanceTable&) = default;

  private:
    std::vector<double> values_;
    std::vector<std::string> texts_;
};

/// Square matrix of decimal strings as read from a file or built from numbers.
struct RawMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<std::string>> rows;

    static RawMatrix from_values(std::vector<std::string> labels,
                                 const std::vector<std::vector<double>>& values) {
        RawMatrix m;
        m.labels = std::move(labels);
        for (const auto& row : values) {
            auto& out = m.rows.emplace_back();
            for (double v : row) {
                out.push_back(Decimal::shortest_text(v));
            }
        }
        return m;
    }
};

struct QuantizeOptions {
    /// Distinct values closer than this (after sorting) share one table entry.
    /// 0 means exact decimal equality.
    double epsilon = 0.0;
    /// Cap on the witnesses stored in a ValidationReport.
    std::size_t max_witnesses = 16;
};

enum class ViolationKind { NonzeroDiagonal, NonPositive, Asymmetric, StrongTriangle, NotEquidistant };

inline std::string_view to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::NonzeroDiagonal: return "nonzero_diagonal";
    case ViolationKind::NonPositive: return "nonpositive";
    case ViolationKind::Asymmetric: return "asymmetric";
    case ViolationKind::StrongTriangle: return "strong_triangle";
    case ViolationKind::NotEquidistant: return "not_equidistant";
    }
    return "unknown";
}

struct Violation {
    ViolationKind kind;
    std::vector<std::string> labels;    // witness points (1, 2 or 3)
    std::vector<std::string> distances; // the offending distances, as text
    std::string message;
};

struct ValidationReport {
    bool ok = true;
    std::size_t violation_count = 0; // total, including the ones not stored
    std::vector<Violation> violations;
};

/// Thrown when a matrix that must be ultrametric is not.
class NotUltrametric : public DomainError {
  public:
    explicit NotUltrametric(ValidationReport report)
        : DomainError(describe(report)), report_(std::move(report)) {}

    const ValidationReport& report() const { return report_; }

  private:
    static std::string describe(const ValidationReport& report) {
        std::string msg = "not ultrametric: " + std::to_string(report.violation_count) + " violation(s)";
        if (!report.violations.empty()) {
            msg += "; first: " + report.violations.front().message;
        }
        return msg;
    }

    ValidationReport report_;
};

inline void check_label(std::string_view label) {
    if (label.empty()) {
        throw InputError("empty label");
    }
    for (unsigned char c : label) {
        if (c < 0x20 || c == 0x7f || c == ',') {
            throw InputError("label '" + std::string(label) + "' contains a comma or control character");
        }
    }
}

inline void check_labels(std::span<const std::string> labels) {
    std::unordered_map<std::string_view, std::size_t> seen;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        check_label(labels[i]);
        if (!seen.emplace(labels[i], i).second) {
            throw InputError("duplicate label '" + labels[i] + "'");
        }
    }
}

namespace detail {

struct Quantized {
    DistanceTable table;
    std::vector<Rank> ranks; // one per input cell
};

/// Groups the strictly positive decimals into table entries. Zero maps to kZeroRank.
/// Exact mode (epsilon == 0) groups by decimal equality; otherwise sorted values whose
/// gap to the previous value is <= epsilon join the previous group.
inline Quantized quantize(std::span<const Decimal> cells, std::span<const std::string> texts, double epsilon) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cells[i].is_zero()) {
            order.push_back(i);
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cells[a] < cells[b]; });

    Quantized out;
    out.ranks.assign(cells.size(), kZeroRank);
    std::vector<double> values;
    std::vector<std::string> group_texts;
    double previous = 0.0;
    const Decimal* previous_exact = nullptr;
    for (std::size_t idx : order) {
        const double v = cells[idx].to_double();
        bool join = false;
        if (!values.empty()) {
            join = epsilon > 0.0 ? (v - previous) <= epsilon : cells[idx] == *previous_exact;
        }
        if (!join) {
            // Distinct decimals closer than double resolution would break strict ordering.
            if (!values.empty() && !(values.back() < v)) {
                throw InputError("distances " + group_texts.back() + " and " + texts[idx] +
                                 " are distinct but not separable in double precision");
            }
            values.push_back(v);
            group_texts.push_back(texts[idx]);
        }
        previous = v;
        previous_exact = &cells[idx];
        out.ranks[idx] = static_cast<Rank>(values.size());
    }
    out.table = DistanceTable(std::move(values), std::move(group_texts));
    return out;
}

inline Quantized parse_cells(const RawMatrix& m, double epsilon) {
    const std::size_t n = m.labels.size();
    if (n < 2) {
        throw InputError("a space needs at least two points (got " + std::to_string(n) + ")");
    }
    if (m.rows.size() != n) {
        throw InputError("matrix is not square: " + std::to_string(n) + " labels but " +
                         std::to_string(m.rows.size()) + " rows");
    }
    std::vector<Decimal> cells;
    std::vector<std::string> texts;
    cells.reserve(n * n);
    texts.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (m.rows[i].size() != n) {
            throw InputError("matrix is not square: row " + std::to_string(i + 1) + " ('" + m.labels[i] + "') has " +
                             std::to_string(m.rows[i].size()) + " entries, expected " + std::to_string(n));
        }
        for (std::size_t j = 0; j < n; ++j) {
            const std::string& text = m.rows[i][j];
            auto d = Decimal::parse(text);
            const std::string where = "entry (" + m.labels[i] + "," + m.labels[j] + ")";
            if (!d) {
                throw InputError(where + " is not a decimal number: '" + text + "'");
            }
            if (d->is_negative() && !d->is_zero()) {
                throw InputError(where + " is negative: " + text);
            }
            if (!std::isfinite(d->to_double())) {
                throw InputError(where + " is out of range: " + text);
            }
            cells.push_back(*d);
            texts.push_back(text);
        }
    }
    return quantize(cells, texts, epsilon);
}

} // namespace detail

/// Checks zero diagonal, positivity, symmetry and the strong triangle inequality on a
/// rank matrix. Labels and table are used only for rendering witnesses.
inline ValidationReport validate_ranks(std::span<const std::string> labels, const DistanceTable& table,
                                       std::span<const Rank> ranks, std::size_t max_witnesses = 16) {
    const std::size_t n = labels.size();
    ValidationReport report;
    auto at = [&](std::size_t i, std::size_t j) { return ranks[i * n + j]; };
    auto d = [&](std::size_t i, std::size_t j) {
        return "d(" + labels[i] + "," + labels[j] + ")=" + table.text(at(i, j));
    };
    auto add = [&](ViolationKind kind, std::vector<std::size_t> pts, std::vector<Rank> rs, std::string msg) {
        report.ok = false;
        ++report.violation_count;
        if (report.violations.size() >= max_witnesses) {
            return;
        }
        Violation v{kind, {}, {}, std::move(msg)};
        for (auto p : pts) {
            v.labels.push_back(labels[p]);
        }
        for (auto r : rs) {
            v.distances.push_back(table.text(r));
        }
        report.violations.push_back(std::move(v));
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (at(i, i) != kZeroRank) {
            add(ViolationKind::NonzeroDiagonal, {i}, {at(i, i)}, d(i, i) + " must be 0");
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (at(i, j) != at(j, i)) {
                add(ViolationKind::Asymmetric, {i, j}, {at(i, j), at(j, i)}, d(i, j) + " != " + d(j, i));
            }
            if (at(i, j) == kZeroRank) {
                add(ViolationKind::NonPositive, {i, j}, {at(i, j)}, d(i, j) + " must be positive");
            }
        }
    }
    // Upper triangle only; asymmetry has been reported above.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                const Rank ij = at(i, j), jk = at(j, k), ik = at(i, k);
                // The largest side must not exceed the other two's max; check each side.
                std::string msg;
                if (ij > std::max(ik, jk)) {
                    msg = d(i, j) + " > max(" + d(i, k) + ", " + d(j, k) + ")";
                } else if (ik > std::max(ij, jk)) {
                    msg = d(i, k) + " > max(" + d(i, j) + ", " + d(j, k) + ")";
                } else if (jk > std::max(ij, ik)) {
                    msg = d(j, k) + " > max(" + d(i, j) + ", " + d(i, k) + ")";
                }
                if (!msg.empty()) {
                    add(ViolationKind::StrongTriangle, {i, j, k}, {ij, jk, ik}, std::move(msg));
                }
            }
        }
    }
    return report;
}

/// Quantizes (with options.epsilon) and validates a raw matrix. Structural problems
/// (non-square, n < 2, unparsable/negative/NaN entries) throw InputError naming the entry.
inline ValidationReport validate_ultrametric(const RawMatrix& matrix, const QuantizeOptions& options = {}) {
    auto q = detail::parse_cells(matrix, options.epsilon);
    return validate_ranks(matrix.labels, q.table, q.ranks, options.max_witnesses);
}

/**
 * Finite ultrametric space with distances stored as ranks into a DistanceTable.
 *
 * Immutable after construction. Points are addressed by their index in input order;
 * every PointSet handed out is sorted by label (plain lexicographic string order).
 * The table is compact: it holds exactly the distances that occur.
 */
class UltrametricSpace {
  public:
    /// Validates labels (InputError) and ultrametricity (NotUltrametric).
    static UltrametricSpace from_ranks(std::vector<std::string> labels, const DistanceTable& table,
                                       std::vector<Rank> ranks, std::size_t max_witnesses = 16) {
        const std::size_t n = labels.size();
        if (n < 2) {
            throw InputError("a space needs at least two points (got " + std::to_string(n) + ")");
        }
        if (ranks.size() != n * n) {
            throw InputError("rank matrix size does not match label count");
        }
        check_labels(labels);
        for (Rank r : ranks) {
            if (r != kZeroRank && r > table.size()) {
                throw InputError("rank out of table range");
            }
        }
        auto report = validate_ranks(labels, table, ranks, max_witnesses);
        if (!report.ok) {
            throw NotUltrametric(std::move(report));
        }
        return UltrametricSpace(std::move(labels), table, std::move(ranks));
    }

    std::size_t size() const { return labels_.size(); }
    const std::string& label(Point p) const { return labels_.at(p); }
    std::span<const std::string> labels() const { return labels_; }
    const DistanceTable& table() const { return table_; }
    std::span<const Rank> ranks() const { return ranks_; }

    Rank rank(Point a, Point b) const { return ranks_[a * size() + b]; }
    double value(Point a, Point b) const { return table_.value(rank(a, b)); }
    const std::string& text(Point a, Point b) const { return table_.text(rank(a, b)); }

    std::optional<Point> find(std::string_view label) const {
        auto it = index_.find(std::string(label));
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    /// Index of a label; InputError when absent.
    Point at(std::string_view label) const {
        if (auto p = find(label)) {
            return *p;
        }
        throw InputError("unknown label '" + std::string(label) + "'");
    }

    PointSet points(std::span<const std::string> labels) const {
        PointSet out;
        for (const auto& l : labels) {
            out.push_back(at(l));
        }
        return sort_by_label(std::move(out));
    }

    bool label_less(Point a, Point b) const { return label_order_[a] < label_order_[b]; }

    /// Sorts by label and removes duplicates.
    PointSet sort_by_label(PointSet set) const {
        std::sort(set.begin(), set.end(), [this](Point a, Point b) { return label_less(a, b); });
        set.erase(std::unique(set.begin(), set.end()), set.end());
        return set;
    }

    /// All points, sorted by label.
    PointSet all_points() const {
        PointSet all(size());
        std::iota(all.begin(), all.end(), Point{0});
        return sort_by_label(std::move(all));
    }

    std::vector<std::string> labels_of(std::span<const Point> set) const {
        std::vector<std::string> out;
        for (Point p : set) {
            out.push_back(label(p));
        }
        return out;
    }

    /// Subspace on the given points, in this space's index order. Needs >= 2 points.
    UltrametricSpace restrict(std::span<const Point> subset) const {
        std::vector<Point> keep(subset.begin(), subset.end());
        std::sort(keep.begin(), keep.end());
        keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
        if (keep.size() < 2) {
            throw InputError("a subspace needs at least two points");
        }
        std::vector<std::string> labels;
        std::vector<Rank> ranks;
        for (Point a : keep) {
            labels.push_back(label(a));
            for (Point b : keep) {
                ranks.push_back(rank(a, b));
            }
        }
        return UltrametricSpace(std::move(labels), table_, std::move(ranks));
    }

    friend bool operator==(const UltrametricSpace& a, const UltrametricSpace& b) {
        return a.labels_ == b.labels_ && a.table_ == b.table_ && a.ranks_ == b.ranks_;
    }

  private:
    UltrametricSpace(std::vector<std::string> labels, const DistanceTable& table, std::vector<Rank> ranks)
        : labels_(std::move(labels)), ranks_(std::move(ranks)) {
        compact(table);
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            index_.emplace(labels_[i], i);
        }
        std::vector<Point> order(labels_.size());
        std::iota(order.begin(), order.end(), Point{0});
        std::sort(order.begin(), order.end(), [this](Point a, Point b) { return labels_[a] < labels_[b]; });
        label_order_.resize(labels_.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            label_order_[order[pos]] = pos;
        }
    }

    void compact(const DistanceTable& table) {
        std::vector<bool> used(table.size() + 1, false);
        for (Rank r : ranks_) {
            used[r] = true;
        }
        std::vector<Rank> remap(table.size() + 1, kZeroRank);
        std::vector<double> values;
        std::vector<std::string> texts;
        for (Rank r = 1; r <= table.size(); ++r) {
            if (used[r]) {
                values.push_back(table.value(r));
                texts.push_back(table.text(r));
                remap[r] = static_cast<Rank>(values.size());
            }
        }
        for (Rank& r : ranks_) {
            r = remap[r];
        }
        table_ = DistanceTable(std::move(values), std::move(texts));
    }

    std::vector<std::string> labels_;
    DistanceTable table_;
    std::vector<Rank> ranks_;
    std::unordered_map<std::string, Point> index_;
    std::vector<std::size_t> label_order_;
};

/// Builds a space from a raw matrix: quantize, validate, construct.
inline UltrametricSpace make_space(const RawMatrix& matrix, const QuantizeOptions& options = {}) {
    auto q = detail::parse_cells(matrix, options.epsilon);
    return UltrametricSpace::from_ranks(matrix.labels, q.table, std::move(q.ranks), options.max_witnesses);
}

struct Ball {
    Point center;
    Rank radius; // kInfiniteRank for an infinite radius
    bool closed;
    PointSet members;
};

/// B_r(x) = {p : d(x,p) < r}, or <= r when closed. The radius is a rank, so only
/// table values (and kInfiniteRank) can be used; see the double overload otherwise.
inline Ball ball(const UltrametricSpace& space, Point center, Rank radius, bool closed) {
    if (center >= space.size()) {
        throw InputError("ball center out of range");
    }
    if (radius == kZeroRank) {
        throw InputError("ball radius must be positive");
    }
    Ball out{center, radius, closed, {}};
    for (Point p = 0; p < space.size(); ++p) {
        const Rank r = space.rank(center, p);
        if (r < radius || (closed && r == radius)) {
            out.members.push_back(p);
        }
    }
    out.members = space.sort_by_label(std::move(out.members));
    return out;
}

/// Ball with an arbitrary positive real radius; `radius` in the result is the smallest
/// table rank whose value is >= r (or table.size()+1 when none is).
inline Ball ball(const UltrametricSpace& space, std::string_view center, double radius, bool closed) {
    const Point c = space.at(center);
    if (!(radius > 0.0)) {
        throw InputError("ball radius must be positive");
    }
    Ball out{c, space.table().lower_rank(radius), closed, {}};
    for (Point p = 0; p < space.size(); ++p) {
        const double v = space.value(c, p);
        if (v < radius || (closed && v == radius)) {
            out.members.push_back(p);
        }
    }
    out.members = space.sort_by_label(std::move(out.members));
    return out;
}

struct TriangleProfile {
    std::array<Rank, 3> sorted; // ascending
    bool isosceles;             // the two largest sides are equal
};

inline TriangleProfile triangle_profile(const UltrametricSpace& space, Point x, Point y, Point z) {
    if (x == y || y == z || x == z) {
        throw InputError("triangle_profile needs three distinct points");
    }
    std::array<Rank, 3> sides{space.rank(x, y), space.rank(y, z), space.rank(x, z)};
    std::sort(sides.begin(), sides.end());
    return {sides, sides[1] == sides[2]};
}

} // namespace ultrabase
