#pragma once

#include "ultrabase/basis.hpp"
#include "ultrabase/core.hpp"

namespace ultrabase {

/// Distances from every point to an ordered landmark list. Independent of any space,
/// so it can be read from a file and rebuilt into one.
struct CoordinateTable {
    std::vector<std::string> labels;    // one per row
    std::vector<std::string> landmarks; // one per column, each also a row label
    DistanceTable table;
    std::vector<Rank> ranks; // row-major labels.size() x landmarks.size()

    Rank at(std::size_t row, std::size_t col) const { return ranks[row * landmarks.size() + col]; }

    friend bool operator==(const CoordinateTable&, const CoordinateTable&) = default;
};

/// Thrown when two points share a coordinate vector.
class NotAGenerator : public DomainError {
  public:
    NotAGenerator(std::string first, std::string second)
        : DomainError("not a metric generator: points '" + first + "' and '" + second +
                      "' have identical coordinates"),
          first_(std::move(first)), second_(std::move(second)) {}

    const std::string& first() const { return first_; }
    const std::string& second() const { return second_; }

  private:
    std::string first_;
    std::string second_;
};

class InconsistentCoordinates : public DomainError {
  public:
    using DomainError::DomainError;
};

/// Column extraction; rows follow the space's index order, columns the given landmark
/// order (duplicates dropped).
inline CoordinateTable coordinates(const UltrametricSpace& space, std::span<const Point> landmarks) {
    if (landmarks.empty()) {
        throw InputError("landmark set is empty");
    }
    std::vector<Point> cols;
    for (Point s : landmarks) {
        if (s >= space.size()) {
            throw InputError("landmark out of range");
        }
        if (std::find(cols.begin(), cols.end(), s) == cols.end()) {
            cols.push_back(s);
        }
    }
    CoordinateTable out;
    out.labels.assign(space.labels().begin(), space.labels().end());
    for (Point s : cols) {
        out.landmarks.push_back(space.label(s));
    }
    // Compact to the values that occur in the selected columns.
    std::vector<Rank> remap(space.table().size() + 1, kZeroRank);
    std::vector<bool> used(space.table().size() + 1, false);
    for (Point x = 0; x < space.size(); ++x) {
        for (Point s : cols) {
            used[space.rank(x, s)] = true;
        }
    }
    std::vector<double> values;
    std::vector<std::string> texts;
    for (Rank r = 1; r <= space.table().size(); ++r) {
        if (used[r]) {
            values.push_back(space.table().value(r));
            texts.push_back(space.table().text(r));
            remap[r] = static_cast<Rank>(values.size());
        }
    }
    out.table = DistanceTable(std::move(values), std::move(texts));
    for (Point x = 0; x < space.size(); ++x) {
        for (Point s : cols) {
            out.ranks.push_back(remap[space.rank(x, s)]);
        }
    }
    return out;
}

inline CoordinateTable coordinates(const UltrametricSpace& space, std::span<const std::string> landmarks) {
    std::vector<Point> cols;
    for (const auto& l : landmarks) {
        cols.push_back(space.at(l));
    }
    return coordinates(space, std::span<const Point>(cols));
}

/**
 * Rebuilds the full space from landmark coordinates.
 *
 * For x != y the first column s with different entries gives
 * d(x,y) = max(d(x,s), d(y,s)). The result is validated as ultrametric and its
 * coordinates must reproduce the input table; otherwise InconsistentCoordinates.
 * Identical rows throw NotAGenerator.
 */
inline UltrametricSpace reconstruct(const CoordinateTable& coords, std::size_t max_witnesses = 16) {
    const std::size_t n = coords.labels.size();
    const std::size_t k = coords.landmarks.size();
    if (n < 2) {
        throw InputError("coordinate table needs at least two rows");
    }
    if (k == 0) {
        throw InputError("coordinate table has no landmark columns");
    }
    if (coords.ranks.size() != n * k) {
        throw InputError("coordinate table shape mismatch");
    }
    check_labels(coords.labels);
    std::vector<std::size_t> landmark_row(k);
    for (std::size_t c = 0; c < k; ++c) {
        auto it = std::find(coords.labels.begin(), coords.labels.end(), coords.landmarks[c]);
        if (it == coords.labels.end()) {
            throw InputError("landmark '" + coords.landmarks[c] + "' has no row");
        }
        landmark_row[c] = static_cast<std::size_t>(it - coords.labels.begin());
    }
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t r = 0; r < n; ++r) {
            const bool own = r == landmark_row[c];
            if (own != (coords.at(r, c) == kZeroRank)) {
                throw InputError("entry (" + coords.labels[r] + "," + coords.landmarks[c] + ") must be " +
                                 (own ? "0" : "positive"));
            }
        }
    }

    std::vector<Rank> ranks(n * n, kZeroRank);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
            std::optional<Rank> d;
            for (std::size_t c = 0; c < k && !d; ++c) {
                if (coords.at(x, c) != coords.at(y, c)) {
                    d = std::max(coords.at(x, c), coords.at(y, c));
                }
            }
            if (!d) {
                throw NotAGenerator(coords.labels[x], coords.labels[y]);
            }
            ranks[x * n + y] = ranks[y * n + x] = *d;
        }
    }

    auto report = validate_ranks(coords.labels, coords.table, ranks, max_witnesses);
    if (!report.ok) {
        throw InconsistentCoordinates("inconsistent coordinates: " + report.violations.front().message);
    }
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t c = 0; c < k; ++c) {
            const std::size_t s = landmark_row[c];
            if (ranks[x * n + s] != coords.at(x, c)) {
                throw InconsistentCoordinates("inconsistent coordinates: rebuilt d(" + coords.labels[x] + "," +
                                              coords.landmarks[c] + ")=" + coords.table.text(ranks[x * n + s]) +
                                              " but the table says " + coords.table.text(coords.at(x, c)));
            }
        }
    }
    return UltrametricSpace::from_ranks(coords.labels, coords.table, std::move(ranks), max_witnesses);
}

/// reconstruct(coordinates(space, S)) == space. DomainError when S does not generate.
inline bool verify_roundtrip(const UltrametricSpace& space, std::span<const Point> landmarks) {
    auto gen = is_k_generator(space, landmarks, 1);
    if (!gen.ok) {
        throw DomainError("not a metric generator: pair (" + space.label(gen.witness->first) + "," +
                          space.label(gen.witness->second) + ") is not distinguished");
    }
    return reconstruct(coordinates(space, landmarks)) == space;
}

} // namespace ultrabase
