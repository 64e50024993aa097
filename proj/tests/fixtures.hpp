#pragma once

#include "ultrabase.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace ultrabase::test {

inline std::vector<std::string> numbered_labels(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 1; i <= n; ++i) {
        labels.push_back(std::to_string(i));
    }
    return labels;
}

/// d(a,b) = 1 for a != b.
inline UltrametricSpace uniform_space(std::size_t n) {
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
        d[i][i] = 0.0;
    }
    return make_space(RawMatrix::from_values(numbered_labels(n), d));
}

/// Points 1..n with d(a,b) = 1/min(a,b).
inline UltrametricSpace inverse_min_space(std::size_t n) {
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 1; a <= n; ++a) {
        for (std::size_t b = 1; b <= n; ++b) {
            if (a != b) {
                d[a - 1][b - 1] = 1.0 / static_cast<double>(std::min(a, b));
            }
        }
    }
    return make_space(RawMatrix::from_values(numbered_labels(n), d));
}

inline UltrametricSpace two_point_space(const std::string& distance = "1") {
    RawMatrix m{{"1", "2"}, {{"0", distance}, {distance, "0"}}};
    return make_space(m);
}

/// Partner test straight from the definition: d(x,z) >= d(x,y) and d(y,z) >= d(x,y)
/// for every other z.
inline bool partners_by_definition(const UltrametricSpace& s, Point x, Point y) {
    if (x == y) {
        return false;
    }
    for (Point z = 0; z < s.size(); ++z) {
        if (z == x || z == y) {
            continue;
        }
        if (s.rank(x, z) < s.rank(x, y) || s.rank(y, z) < s.rank(x, y)) {
            return false;
        }
    }
    return true;
}

inline PointSet pts(const UltrametricSpace& s, std::initializer_list<const char*> labels) {
    PointSet out;
    for (const char* l : labels) {
        out.push_back(s.at(l));
    }
    return s.sort_by_label(std::move(out));
}

inline std::vector<std::string> names(const UltrametricSpace& s, const PointSet& set) { return s.labels_of(set); }

/// Seeds and sizes shared by the property tests.
struct RandomCase {
    std::size_t n;
    std::uint64_t seed;
    std::size_t values;
};

inline void PrintTo(const RandomCase& c, std::ostream* os) {
    *os << "n" << c.n << "_seed" << c.seed << "_v" << c.values;
}

inline std::vector<RandomCase> random_cases(std::size_t count, std::size_t min_n, std::size_t max_n,
                                            std::uint64_t salt = 0) {
    std::vector<RandomCase> out;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t n = min_n + (i * 7 + salt) % (max_n - min_n + 1);
        out.push_back({n, 1000 + salt * 7919 + i, 1 + (i + salt) % 6});
    }
    return out;
}

} // namespace ultrabase::test
