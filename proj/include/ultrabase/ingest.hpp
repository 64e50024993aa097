#pragma once

#include "ultrabase/core.hpp"
#include "ultrabase/reconstruct.hpp"

#include <cctype>
#include <memory>
#include <sstream>

namespace ultrabase {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

/// Comma-separated rows; no quoting (labels may not contain commas). Blank lines are
/// skipped. Each row keeps its 1-based line number for error messages.
inline std::vector<std::pair<std::size_t, std::vector<std::string>>> split_csv(std::string_view text) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const std::size_t eol = text.find('\n');
        std::string_view line = eol == std::string_view::npos ? text : text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        while (true) {
            const std::size_t comma = line.find(',');
            fields.emplace_back(trim(line.substr(0, comma)));
            if (comma == std::string_view::npos) {
                break;
            }
            line = line.substr(comma + 1);
        }
        rows.emplace_back(line_no, std::move(fields));
    }
    return rows;
}

} // namespace detail

/**
 * Reads a labelled square matrix:
 *
 *     label,A,B,C
 *     A,0,1,1
 *     B,1,0,1
 *     C,1,1,0
 *
 * The first header cell is ignored. Row labels must repeat the header labels in order.
 * No numeric validation happens here beyond shape; see make_space.
 */
inline RawMatrix parse_distance_csv_raw(std::string_view text) {
    auto rows = detail::split_csv(text);
    if (rows.empty()) {
        throw InputError("distance csv: empty input");
    }
    RawMatrix m;
    const auto& header = rows.front().second;
    m.labels.assign(header.begin() + 1, header.end());
    check_labels(m.labels);
    if (rows.size() - 1 != m.labels.size()) {
        throw InputError("distance csv: header names " + std::to_string(m.labels.size()) + " labels but there are " +
                         std::to_string(rows.size() - 1) + " data rows");
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& [line, fields] = rows[i];
        if (fields.size() != m.labels.size() + 1) {
            throw InputError("distance csv line " + std::to_string(line) + ": expected " +
                             std::to_string(m.labels.size() + 1) + " fields, got " + std::to_string(fields.size()));
        }
        if (fields.front() != m.labels[i - 1]) {
            throw InputError("distance csv line " + std::to_string(line) + ": row label '" + fields.front() +
                             "' does not match header label '" + m.labels[i - 1] + "'");
        }
        m.rows.emplace_back(fields.begin() + 1, fields.end());
    }
    return m;
}

inline UltrametricSpace parse_distance_csv(std::string_view text, const QuantizeOptions& options = {}) {
    return make_space(parse_distance_csv_raw(text), options);
}

inline std::string write_distance_csv(const UltrametricSpace& space) {
    std::string out = "label";
    for (const auto& l : space.labels()) {
        out += "," + l;
    }
    out += "\n";
    for (Point x = 0; x < space.size(); ++x) {
        out += space.label(x);
        for (Point y = 0; y < space.size(); ++y) {
            out += "," + space.text(x, y);
        }
        out += "\n";
    }
    return out;
}

/// Header "label,s1,...,sk", one row per point.
inline CoordinateTable parse_coordinate_csv(std::string_view text, double epsilon = 0.0) {
    auto rows = detail::split_csv(text);
    if (rows.empty()) {
        throw InputError("coordinate csv: empty input");
    }
    CoordinateTable out;
    const auto& header = rows.front().second;
    out.landmarks.assign(header.begin() + 1, header.end());
    if (out.landmarks.empty()) {
        throw InputError("coordinate csv: no landmark columns");
    }
    check_labels(out.landmarks);
    const std::size_t k = out.landmarks.size();
    std::vector<Decimal> cells;
    std::vector<std::string> texts;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& [line, fields] = rows[i];
        if (fields.size() != k + 1) {
            throw InputError("coordinate csv line " + std::to_string(line) + ": expected " + std::to_string(k + 1) +
                             " fields, got " + std::to_string(fields.size()));
        }
        out.labels.push_back(fields.front());
        for (std::size_t c = 1; c <= k; ++c) {
            auto d = Decimal::parse(fields[c]);
            if (!d || (d->is_negative() && !d->is_zero()) || !std::isfinite(d->to_double())) {
                throw InputError("coordinate csv line " + std::to_string(line) + ": bad distance '" + fields[c] + "'");
            }
            cells.push_back(*d);
            texts.push_back(fields[c]);
        }
    }
    check_labels(out.labels);
    auto q = detail::quantize(cells, texts, epsilon);
    out.table = std::move(q.table);
    out.ranks = std::move(q.ranks);
    return out;
}

inline std::string write_coordinate_csv(const CoordinateTable& table) {
    std::string out = "label";
    for (const auto& l : table.landmarks) {
        out += "," + l;
    }
    out += "\n";
    for (std::size_t r = 0; r < table.labels.size(); ++r) {
        out += table.labels[r];
        for (std::size_t c = 0; c < table.landmarks.size(); ++c) {
            out += "," + table.table.text(table.at(r, c));
        }
        out += "\n";
    }
    return out;
}

struct NewickNode {
    std::string label; // leaves: required; internal: parsed and ignored downstream
    std::optional<double> length;
    std::vector<NewickNode> children;

    bool is_leaf() const { return children.empty(); }
};

struct NewickTree {
    NewickNode root;
};

namespace detail {

class NewickParser {
  public:
    explicit NewickParser(std::string_view text) : text_(text) {}

    NewickTree parse() {
        NewickTree tree{subtree()};
        skip_space();
        expect(';');
        skip_space();
        if (pos_ != text_.size()) {
            fail("unexpected text after ';'");
        }
        return tree;
    }

  private:
    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("newick: " + what + " at position " + std::to_string(pos_));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool peek(char c) {
        skip_space();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    void expect(char c) {
        if (!peek(c)) {
            fail(std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    std::string label() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' ||
                std::isspace(static_cast<unsigned char>(c))) {
                break;
            }
            if (c == '[' || c == '\'') {
                fail("comments and quoted labels are not supported");
            }
            ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    std::optional<double> length() {
        if (!peek(':')) {
            return std::nullopt;
        }
        ++pos_;
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                       text_[pos_] == 'e' || text_[pos_] == 'E' || text_[pos_] == '+' ||
                                       text_[pos_] == '-')) {
            ++pos_;
        }
        auto d = Decimal::parse(text_.substr(start, pos_ - start));
        if (!d) {
            pos_ = start;
            fail("malformed branch length");
        }
        if (d->is_negative() && !d->is_zero()) {
            pos_ = start;
            fail("negative branch length");
        }
        return d->to_double();
    }

    NewickNode subtree() {
        NewickNode node;
        const std::size_t start = pos_;
        if (peek('(')) {
            ++pos_;
            node.children.push_back(child());
            if (!peek(',')) {
                fail("an internal node needs at least two children");
            }
            while (peek(',')) {
                ++pos_;
                node.children.push_back(child());
            }
            expect(')');
            node.label = label();
        } else {
            node.label = label();
            if (node.label.empty()) {
                pos_ = start;
                skip_space();
                fail("expected a leaf label or '('");
            }
        }
        node.length = length();
        return node;
    }

    NewickNode child() {
        NewickNode node = subtree();
        if (!node.length) {
            fail("missing branch length" + (node.label.empty() ? std::string() : " for '" + node.label + "'"));
        }
        return node;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Grammar: tree := subtree ";"; subtree := leaf [":" len] | "(" subtree ("," subtree)+ ")" [label] [":" len].
/// Every non-root edge needs a length. A root length is accepted and ignored.
inline NewickTree parse_newick_tree(std::string_view text) { return detail::NewickParser(text).parse(); }

/**
 * Leaf path metric of an equidistant tree: d(a,b) is the sum of branch lengths on the
 * path between the leaves. Leaves are ordered as they appear in the text.
 * Throws DomainError when root-to-leaf lengths differ by more than epsilon.
 */
inline UltrametricSpace newick_space(const NewickTree& tree, double epsilon = 1e-9) {
    std::vector<std::string> labels;
    std::vector<double> depth;
    // Collect leaves with depth, then fill pairwise distances bottom-up: for leaves in
    // different children of v, d = (depth_a - depth_v) + (depth_b - depth_v).
    std::vector<std::vector<double>> dist;
    auto walk = [&](auto&& self, const NewickNode& node, double node_depth) -> std::vector<std::size_t> {
        if (node.is_leaf()) {
            if (node.label.empty()) {
                throw InputError("newick: unlabelled leaf");
            }
            labels.push_back(node.label);
            depth.push_back(node_depth);
            return {labels.size() - 1};
        }
        std::vector<std::vector<std::size_t>> groups;
        for (const auto& c : node.children) {
            groups.push_back(self(self, c, node_depth + *c.length));
        }
        if (dist.size() < labels.size()) {
            for (auto& row : dist) {
                row.resize(labels.size(), 0.0);
            }
            dist.resize(labels.size(), std::vector<double>(labels.size(), 0.0));
        }
        std::vector<std::size_t> all;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            for (std::size_t h = g + 1; h < groups.size(); ++h) {
                for (auto a : groups[g]) {
                    for (auto b : groups[h]) {
                        dist[a][b] = dist[b][a] = (depth[a] - node_depth) + (depth[b] - node_depth);
                    }
                }
            }
            all.insert(all.end(), groups[g].begin(), groups[g].end());
        }
        return all;
    };
    walk(walk, tree.root, 0.0);
    if (labels.size() < 2) {
        throw InputError("newick: a tree needs at least two leaves");
    }
    check_labels(labels);
    const auto [lo, hi] = std::minmax_element(depth.begin(), depth.end());
    if (*hi - *lo > epsilon) {
        throw DomainError("not ultrametric: root-to-leaf lengths differ (" + labels[lo - depth.begin()] + ": " +
                          Decimal::shortest_text(*lo) + ", " + labels[hi - depth.begin()] + ": " +
                          Decimal::shortest_text(*hi) + ")");
    }
    return make_space(RawMatrix::from_values(labels, dist), {epsilon, 16});
}

inline UltrametricSpace parse_newick(std::string_view text, double epsilon = 1e-9) {
    return newick_space(parse_newick_tree(text), epsilon);
}

/**
 * Largest ultrametric below a dissimilarity: d*(x,y) is the minimum over paths of the
 * largest step (single linkage). Output distances are taken from input cells, with
 * their original text.
 */
inline UltrametricSpace subdominant_ultrametric(const RawMatrix& matrix) {
    const std::size_t n = matrix.labels.size();
    if (n < 2) {
        throw InputError("a space needs at least two points (got " + std::to_string(n) + ")");
    }
    if (matrix.rows.size() != n) {
        throw InputError("dissimilarity matrix is not square");
    }
    std::vector<Decimal> cells(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (matrix.rows[i].size() != n) {
            throw InputError("dissimilarity matrix is not square: row " + std::to_string(i + 1));
        }
        for (std::size_t j = 0; j < n; ++j) {
            auto d = Decimal::parse(matrix.rows[i][j]);
            if (!d || (d->is_negative() && !d->is_zero()) || !std::isfinite(d->to_double())) {
                throw InputError("dissimilarity entry (" + matrix.labels[i] + "," + matrix.labels[j] +
                                 ") is not a nonnegative number: '" + matrix.rows[i][j] + "'");
            }
            cells[i * n + j] = *d;
        }
    }
    // best[i*n+j] indexes the input cell whose value is the current minimax distance.
    std::vector<std::size_t> best(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!cells[i * n + i].is_zero()) {
            throw InputError("dissimilarity diagonal entry (" + matrix.labels[i] + ") must be 0");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (cells[i * n + j] != cells[j * n + i]) {
                throw InputError("dissimilarity matrix is not symmetric at (" + matrix.labels[i] + "," +
                                 matrix.labels[j] + ")");
            }
            best[i * n + j] = std::min(i, j) * n + std::max(i, j);
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const std::size_t via = cells[best[i * n + k]] < cells[best[k * n + j]] ? best[k * n + j]
                                                                                         : best[i * n + k];
                if (cells[via] < cells[best[i * n + j]]) {
                    best[i * n + j] = best[j * n + i] = via;
                }
            }
        }
    }
    RawMatrix out;
    out.labels = matrix.labels;
    for (std::size_t i = 0; i < n; ++i) {
        auto& row = out.rows.emplace_back();
        for (std::size_t j = 0; j < n; ++j) {
            row.push_back(i == j ? "0" : matrix.rows[best[i * n + j] / n][best[i * n + j] % n]);
        }
    }
    return make_space(out);
}

} // namespace ultrabase
