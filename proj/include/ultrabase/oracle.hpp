#pragma once

#include "ultrabase/basis.hpp"
#include "ultrabase/core.hpp"

#include <bit>
#include <cstdint>
#include <random>
#include <set>

namespace ultrabase {

// Brute-force references. Nothing here may call into partner.hpp or the class-based
// parts of basis.hpp except cross_check, which compares the two.

struct OracleResult {
    std::size_t k;
    std::optional<std::size_t> min_cardinality; // nullopt: not even X is a k-generator
    std::vector<PointSet> all_min_generators;   // sorted by label sequence
};

inline constexpr std::size_t kOracleMaxPoints = 16;
inline constexpr std::size_t kCrossCheckMaxPoints = 12;

namespace detail {

inline std::vector<std::uint32_t> pair_distinguisher_masks(const UltrametricSpace& space) {
    const std::size_t n = space.size();
    std::vector<std::uint32_t> masks;
    for (Point x = 0; x < n; ++x) {
        for (Point y = x + 1; y < n; ++y) {
            std::uint32_t m = 0;
            for (Point z = 0; z < n; ++z) {
                if (space.rank(x, z) != space.rank(y, z)) {
                    m |= std::uint32_t{1} << z;
                }
            }
            masks.push_back(m);
        }
    }
    return masks;
}

inline PointSet mask_to_set(const UltrametricSpace& space, std::uint32_t mask) {
    PointSet out;
    for (Point p = 0; p < space.size(); ++p) {
        if (mask & (std::uint32_t{1} << p)) {
            out.push_back(p);
        }
    }
    return space.sort_by_label(std::move(out));
}

inline bool label_sequence_less(const UltrametricSpace& space, const PointSet& a, const PointSet& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [&](Point p, Point q) { return space.label_less(p, q); });
}

} // namespace detail

/// Minimum k-generators by exhaustive search, ascending by cardinality. n <= 16.
inline OracleResult brute_force_dim(const UltrametricSpace& space, std::size_t k) {
    const std::size_t n = space.size();
    if (n > kOracleMaxPoints) {
        throw InputError("brute force is capped at " + std::to_string(kOracleMaxPoints) + " points (got " +
                         std::to_string(n) + ")");
    }
    if (k == 0) {
        throw InputError("k must be at least 1");
    }
    const auto masks = detail::pair_distinguisher_masks(space);
    auto generates = [&](std::uint32_t s) {
        for (auto m : masks) {
            if (static_cast<std::size_t>(std::popcount(m & s)) < k) {
                return false;
            }
        }
        return true;
    };
    const std::uint32_t full = (std::uint32_t{1} << n) - 1;
    OracleResult out{k, std::nullopt, {}};
    for (std::size_t size = 0; size <= n; ++size) {
        // Gosper's hack over all masks with `size` bits.
        std::uint32_t s = size == 0 ? 0 : (std::uint32_t{1} << size) - 1;
        while (true) {
            if (generates(s)) {
                out.all_min_generators.push_back(detail::mask_to_set(space, s));
            }
            if (size == 0 || s == (full & ~((std::uint32_t{1} << (n - size)) - 1))) {
                break;
            }
            const std::uint32_t c = s & (0u - s);
            const std::uint32_t r = s + c;
            s = (((r ^ s) >> 2) / c) | r;
        }
        if (!out.all_min_generators.empty()) {
            out.min_cardinality = size;
            break;
        }
    }
    std::sort(out.all_min_generators.begin(), out.all_min_generators.end(),
              [&](const PointSet& a, const PointSet& b) { return detail::label_sequence_less(space, a, b); });
    return out;
}

/**
 * Cophenetic space of a random hierarchy. Each cluster at level L (1..value_count) is
 * split into 2..size random nonempty parts at distance L; each part recurses at a
 * random lower level, and a level-1 cluster splits into singletons. Labels are
 * x01, x02, ... so label order matches creation order. Deterministic per seed.
 */
inline UltrametricSpace random_dendrogram_space(std::size_t n, std::uint64_t seed, std::size_t value_count) {
    if (n < 2) {
        throw InputError("random space needs n >= 2");
    }
    if (value_count < 1) {
        throw InputError("random space needs value_count >= 1");
    }
    std::mt19937_64 rng(seed);
    std::vector<Rank> ranks(n * n, kZeroRank);

    auto split = [&](auto&& self, std::vector<Point> pts, std::size_t level) -> void {
        if (pts.size() < 2) {
            return;
        }
        std::vector<std::vector<Point>> parts;
        if (level == 1) {
            for (Point p : pts) {
                parts.push_back({p});
            }
        } else {
            std::shuffle(pts.begin(), pts.end(), rng);
            const std::size_t k = std::uniform_int_distribution<std::size_t>(2, pts.size())(rng);
            parts.resize(k);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const std::size_t part = i < k ? i : std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
                parts[part].push_back(pts[i]);
            }
        }
        for (std::size_t a = 0; a < parts.size(); ++a) {
            for (std::size_t b = a + 1; b < parts.size(); ++b) {
                for (Point p : parts[a]) {
                    for (Point q : parts[b]) {
                        ranks[p * n + q] = ranks[q * n + p] = static_cast<Rank>(level);
                    }
                }
            }
        }
        for (auto& part : parts) {
            if (part.size() > 1) {
                const std::size_t child = std::uniform_int_distribution<std::size_t>(1, level - 1)(rng);
                self(self, std::move(part), child);
            }
        }
    };
    std::vector<Point> all(n);
    std::iota(all.begin(), all.end(), Point{0});
    split(split, all, value_count);

    std::vector<double> values;
    std::vector<std::string> texts;
    for (std::size_t v = 1; v <= value_count; ++v) {
        values.push_back(static_cast<double>(v));
        texts.push_back(std::to_string(v));
    }
    const std::size_t width = std::to_string(n).size() < 2 ? 2 : std::to_string(n).size();
    std::vector<std::string> labels;
    for (std::size_t i = 1; i <= n; ++i) {
        std::string digits = std::to_string(i);
        labels.push_back("x" + std::string(width - digits.size(), '0') + digits);
    }
    return UltrametricSpace::from_ranks(std::move(labels), DistanceTable(values, texts), std::move(ranks));
}

struct CrossCheckReport {
    bool pass = true;
    std::string counterexample; // first mismatch, empty on pass
    std::size_t dim1 = 0;
    std::size_t dim2 = 0;
    std::size_t oracle_dim1 = 0;
    std::size_t oracle_dim2 = 0;
    bool oracle_has_3_generator = false;
};

/// Compares the partner-based results against brute force. n <= 12.
inline CrossCheckReport cross_check(const UltrametricSpace& space) {
    if (space.size() > kCrossCheckMaxPoints) {
        throw InputError("cross_check is capped at " + std::to_string(kCrossCheckMaxPoints) + " points (got " +
                         std::to_string(space.size()) + ")");
    }
    CrossCheckReport report;
    auto fail = [&](std::string why) {
        if (report.pass) {
            report.pass = false;
            report.counterexample = std::move(why);
        }
    };
    auto render = [&](const PointSet& s) {
        std::string out = "{";
        for (std::size_t i = 0; i < s.size(); ++i) {
            out += (i ? "," : "") + space.label(s[i]);
        }
        return out + "}";
    };

    const auto o1 = brute_force_dim(space, 1);
    const auto o2 = brute_force_dim(space, 2);
    const auto o3 = brute_force_dim(space, 3);
    const auto dims = dimensions(space);
    report.dim1 = dims.dim1;
    report.dim2 = dims.dim2;
    report.oracle_dim1 = o1.min_cardinality.value_or(0);
    report.oracle_dim2 = o2.min_cardinality.value_or(0);
    report.oracle_has_3_generator = o3.min_cardinality.has_value();

    const auto family = metric_bases(space);
    auto derived_bases = enumerate_bases(space, family, std::numeric_limits<std::size_t>::max());
    std::sort(derived_bases.begin(), derived_bases.end(),
              [&](const PointSet& a, const PointSet& b) { return detail::label_sequence_less(space, a, b); });
    if (derived_bases != o1.all_min_generators) {
        std::set<PointSet> oracle_set(o1.all_min_generators.begin(), o1.all_min_generators.end());
        std::set<PointSet> derived_set(derived_bases.begin(), derived_bases.end());
        std::string detail;
        for (const auto& b : derived_bases) {
            if (!oracle_set.contains(b)) {
                detail = "product-form basis " + render(b) + " is not a minimum generator";
                break;
            }
        }
        if (detail.empty()) {
            for (const auto& b : o1.all_min_generators) {
                if (!derived_set.contains(b)) {
                    detail = "minimum generator " + render(b) + " is missing from the product form";
                    break;
                }
            }
        }
        fail("metric bases differ: " + detail);
    }
    if (dims.dim1 != report.oracle_dim1) {
        fail("dim1 " + std::to_string(dims.dim1) + " != oracle " + std::to_string(report.oracle_dim1));
    }
    const auto p = two_metric_basis(space);
    if (o2.all_min_generators.size() != 1 || o2.all_min_generators.front() != p) {
        fail("2-metric basis " + render(p) + " is not the unique minimum 2-generator (oracle found " +
             std::to_string(o2.all_min_generators.size()) + ")");
    }
    if (dims.dim2 != report.oracle_dim2) {
        fail("dim2 " + std::to_string(dims.dim2) + " != oracle " + std::to_string(report.oracle_dim2));
    }
    if (report.oracle_has_3_generator) {
        fail("oracle found a 3-generator");
    }
    return report;
}

} // namespace ultrabase
