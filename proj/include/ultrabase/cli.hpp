#pragma once

// Command-line front end. Kept in a header with an in-process entry point so the test
// suite can drive it without spawning processes.
//
// Exit codes: 0 success, 1 domain failure, 2 usage or I/O error.

#include "ultrabase/basis.hpp"
#include "ultrabase/ingest.hpp"
#include "ultrabase/oracle.hpp"
#include "ultrabase/partner.hpp"
#include "ultrabase/reconstruct.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>

namespace ultrabase::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kSchemaVersion = 1;

struct Streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) {
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return os.str();
}

inline std::string read_input(const std::string& path, std::istream& in) {
    if (path == "-") {
        return std::string(std::istreambuf_iterator<char>(in), {});
    }
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw InputError("cannot read '" + path + "'");
    }
    return std::string(std::istreambuf_iterator<char>(file), {});
}

enum class Format { Csv, Newick };

inline Format resolve_format(const std::string& path, const std::string& flag) {
    if (flag == "csv") {
        return Format::Csv;
    }
    if (flag == "newick" || flag == "nwk") {
        return Format::Newick;
    }
    if (!flag.empty()) {
        throw InputError("unknown format '" + flag + "' (expected csv or newick)");
    }
    auto ends_with = [&](std::string_view suffix) {
        return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with(".nwk") || ends_with(".newick") || ends_with(".tree")) {
        return Format::Newick;
    }
    if (ends_with(".csv") || path == "-") {
        return Format::Csv;
    }
    throw InputError("cannot infer the format of '" + path + "'; pass --format csv|newick");
}

inline Json labels_json(const UltrametricSpace& space, std::span<const Point> set) {
    Json out = Json::array();
    for (Point p : set) {
        out.push_back(space.label(p));
    }
    return out;
}

inline Json report_envelope(const std::string& command, const std::string& input_text) {
    Json r;
    r["schema"] = kSchemaVersion;
    r["command"] = command;
    r["input_digest"] = input_text.empty() ? Json(nullptr) : Json("sha256:" + sha256_hex(input_text));
    return r;
}

inline Json violations_json(const ValidationReport& report) {
    Json out = Json::array();
    for (const auto& v : report.violations) {
        out.push_back({{"kind", std::string(to_string(v.kind))},
                       {"points", v.labels},
                       {"distances", v.distances},
                       {"message", v.message}});
    }
    return out;
}

inline std::size_t resolve_max_bases(std::optional<std::size_t> flag) {
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv("ULTRABASE_MAX_BASES")) {
        std::size_t value = 0;
        std::string_view s(env);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            throw InputError("ULTRABASE_MAX_BASES must be a nonnegative integer");
        }
        return value;
    }
    return BasisEnumerator::kDefaultCap;
}

inline UltrametricSpace load_space(const std::string& text, Format format, double epsilon) {
    if (format == Format::Newick) {
        return parse_newick(text, epsilon);
    }
    return parse_distance_csv(text, {epsilon, 16});
}

inline int cmd_validate(const std::string& path, const std::string& format_flag, std::optional<double> epsilon,
                        bool json, Streams io) {
    const auto text = read_input(path, io.in);
    const auto format = resolve_format(path, format_flag);
    Json r = report_envelope("validate", text);
    ValidationReport report;
    std::size_t n = 0;
    if (format == Format::Csv) {
        const auto raw = parse_distance_csv_raw(text);
        n = raw.labels.size();
        report = validate_ultrametric(raw, {epsilon.value_or(0.0), 16});
    } else {
        try {
            n = parse_newick(text, epsilon.value_or(1e-9)).size();
        } catch (const NotUltrametric& e) {
            report = e.report();
        } catch (const DomainError& e) {
            report.ok = false;
            report.violation_count = 1;
            report.violations.push_back({ViolationKind::NotEquidistant, {}, {}, e.what()});
        }
    }
    r["result"] = {{"ok", report.ok},
                   {"n", n},
                   {"violation_count", report.violation_count},
                   {"violations", violations_json(report)}};
    r["warnings"] = Json::array();
    if (json) {
        io.out << r.dump(2) << "\n";
    } else if (report.ok) {
        io.out << "ok: " << n << " points, ultrametric\n";
    } else {
        io.out << "invalid: " << report.violation_count << " violation(s)\n";
        for (const auto& v : report.violations) {
            io.out << "  " << v.message << "\n";
        }
    }
    return report.ok ? kExitOk : kExitDomain;
}

inline Json analysis_json(const UltrametricSpace& space, std::size_t max_bases) {
    const auto partition = partner_partition(space);
    const auto dims = dimensions(space);
    const BasisFamily family{partition.classes};
    Json result;
    result["n"] = space.size();
    result["distances"] = Json(std::vector<std::string>(space.table().texts().begin(), space.table().texts().end()));
    Json classes = Json::array();
    for (const auto& c : partition.classes) {
        classes.push_back({{"members", labels_json(space, c)}, {"distance", space.text(c[0], c[1])}});
    }
    result["partner_classes"] = classes;
    result["pseudopartnered"] = labels_json(space, partition.pseudopartnered);
    Json points = Json::array();
    for (Point p = 0; p < space.size(); ++p) {
        const auto cls = classify_point(space, p);
        const auto near = nearest_set(space, p);
        const auto trace = pseudopartnering_trace(space, p);
        points.push_back({{"label", space.label(p)},
                          {"class", is_partnered(cls) ? "partnered" : "pseudopartnered"},
                          {"nearest", labels_json(space, near.points)},
                          {"min_distance", space.table().text(near.distance)},
                          {"trace_terminal", space.label(trace.terminal)}});
    }
    result["points"] = points;
    result["dim1"] = dims.dim1;
    result["dim2"] = dims.dim2;
    result["Dim"] = dims.Dim;
    result["two_metric_basis"] = labels_json(space, two_metric_basis(space));
    result["basis_count"] = family.count().str();
    Json bases = Json::array();
    for (const auto& b : enumerate_bases(space, family, max_bases)) {
        bases.push_back(labels_json(space, b));
    }
    result["bases"] = bases;
    result["bases_truncated"] = BigCount(bases.size()) < family.count();
    return result;
}

inline int cmd_analyze(const std::string& path, const std::string& format_flag, std::optional<double> epsilon,
                       std::optional<std::size_t> max_bases_flag, bool json, Streams io) {
    const auto text = read_input(path, io.in);
    const auto format = resolve_format(path, format_flag);
    const std::size_t max_bases = resolve_max_bases(max_bases_flag);
    const auto space = load_space(text, format, epsilon.value_or(format == Format::Newick ? 1e-9 : 0.0));
    Json r = report_envelope("analyze", text);
    r["result"] = analysis_json(space, max_bases);
    r["warnings"] = Json::array();
    if (r["result"]["bases_truncated"].get<bool>()) {
        r["warnings"].push_back("basis list truncated at " + std::to_string(max_bases));
    }
    if (json) {
        io.out << r.dump(2) << "\n";
        return kExitOk;
    }
    const auto& res = r["result"];
    io.out << "points: " << res["n"].get<std::size_t>() << "\n";
    io.out << "partner classes:";
    for (const auto& c : res["partner_classes"]) {
        io.out << " {";
        bool first = true;
        for (const auto& m : c["members"]) {
            io.out << (first ? "" : ",") << m.get<std::string>();
            first = false;
        }
        io.out << "}";
    }
    io.out << "\npseudopartnered: " << res["pseudopartnered"].size() << "\n";
    io.out << "dim1: " << res["dim1"].get<std::size_t>() << "\n";
    io.out << "dim2: " << res["dim2"].get<std::size_t>() << "\n";
    io.out << "Dim: " << res["Dim"].get<std::size_t>() << "\n";
    io.out << "metric bases: " << res["basis_count"].get<std::string>() << "\n";
    for (const auto& w : r["warnings"]) {
        io.err << "warning: " << w.get<std::string>() << "\n";
    }
    return kExitOk;
}

inline int cmd_coords(const std::string& path, const std::string& format_flag, std::optional<double> epsilon,
                      const std::vector<std::string>& landmarks, bool automatic, Streams io) {
    if (automatic == !landmarks.empty()) {
        throw InputError("pass exactly one of --landmarks or --auto");
    }
    const auto text = read_input(path, io.in);
    const auto format = resolve_format(path, format_flag);
    const auto space = load_space(text, format, epsilon.value_or(format == Format::Newick ? 1e-9 : 0.0));
    PointSet cols;
    if (automatic) {
        const auto family = metric_bases(space);
        cols = *BasisEnumerator(space, family, 1).next();
    } else {
        for (const auto& l : landmarks) {
            cols.push_back(space.at(l));
        }
    }
    const auto gen = is_k_generator(space, cols, 1);
    if (!gen.ok) {
        io.err << "warning: landmarks are not a metric generator; (" << space.label(gen.witness->first) << ","
               << space.label(gen.witness->second) << ") share coordinates\n";
    }
    io.out << write_coordinate_csv(coordinates(space, cols));
    return kExitOk;
}

inline int cmd_reconstruct(const std::string& path, std::optional<double> epsilon, Streams io) {
    const auto text = read_input(path, io.in);
    const auto table = parse_coordinate_csv(text, epsilon.value_or(0.0));
    io.out << write_distance_csv(reconstruct(table));
    return kExitOk;
}

inline int cmd_oracle_check(std::size_t n, std::size_t seeds, std::optional<std::size_t> values,
                            std::uint64_t first_seed, bool json, Streams io) {
    if (n > kCrossCheckMaxPoints) {
        throw InputError("--n is capped at " + std::to_string(kCrossCheckMaxPoints));
    }
    if (n < 2) {
        throw InputError("--n must be at least 2");
    }
    if (values && *values == 0) {
        throw InputError("--values must be at least 1");
    }
    Json r = report_envelope("oracle-check", "");
    Json failures = Json::array();
    std::size_t passed = 0;
    for (std::size_t i = 0; i < seeds; ++i) {
        const std::uint64_t seed = first_seed + i;
        const std::size_t value_count = values.value_or(1 + i % 5);
        const auto space = random_dendrogram_space(n, seed, value_count);
        auto report = cross_check(space);
        for (Point p = 0; p < space.size() && report.pass; ++p) {
            const auto trace = pseudopartnering_trace(space, p);
            if (!is_partnered(trace.terminal_class)) {
                report.pass = false;
                report.counterexample = "trace from " + space.label(p) + " ends at a pseudopartnered point";
            }
        }
        if (report.pass) {
            ++passed;
        } else {
            failures.push_back({{"seed", seed}, {"values", value_count}, {"counterexample", report.counterexample}});
        }
    }
    r["result"] = {{"n", n}, {"instances", seeds}, {"passed", passed}, {"failures", failures}};
    r["warnings"] = Json::array();
    if (json) {
        io.out << r.dump(2) << "\n";
    } else {
        io.out << "oracle-check: " << passed << "/" << seeds << " instances agree (n=" << n << ")\n";
        for (const auto& f : failures) {
            io.out << "  seed " << f["seed"].get<std::uint64_t>() << ": " << f["counterexample"].get<std::string>()
                   << "\n";
        }
    }
    return failures.empty() ? kExitOk : kExitDomain;
}

/// Entry point. args[0] is the program name.
inline int run(const std::vector<std::string>& args, Streams io) {
    CLI::App app{"Analyze finite ultrametric spaces: partners, metric bases, dimensions, reconstruction",
                 "ultrabase"};
    app.require_subcommand(1);

    std::string input;
    std::string format;
    std::optional<double> epsilon;
    bool json = false;
    std::optional<std::size_t> max_bases;
    std::vector<std::string> landmarks;
    bool automatic = false;
    std::size_t n = 8;
    std::size_t seeds = 100;
    std::optional<std::size_t> values;
    std::uint64_t first_seed = 0;

    auto add_input = [&](CLI::App* cmd) {
        cmd->add_option("input", input, "Input file (.csv or .nwk), or - for stdin")->required();
        cmd->add_option("--format", format, "csv or newick (default: from the extension)");
        cmd->add_option("--epsilon", epsilon, "Merge distances closer than this (csv default 0, newick 1e-9)");
    };

    auto* validate = app.add_subcommand("validate", "Check that a matrix or tree is ultrametric");
    add_input(validate);
    validate->add_flag("--json", json, "Print the JSON report");

    auto* analyze = app.add_subcommand("analyze", "Partner classes, dimensions and metric bases");
    add_input(analyze);
    analyze->add_flag("--json", json, "Print the JSON report");
    analyze->add_option("--max-bases", max_bases, "Cap on listed bases (env ULTRABASE_MAX_BASES, default 10000)");

    auto* coords = app.add_subcommand("coords", "Distances from every point to a landmark set, as CSV");
    add_input(coords);
    coords->add_option("--landmarks", landmarks, "Comma-separated landmark labels")->delimiter(',');
    coords->add_flag("--auto", automatic, "Use the lexicographically first metric basis");

    auto* rebuild = app.add_subcommand("reconstruct", "Rebuild a distance matrix from a coordinate table");
    rebuild->add_option("table", input, "Coordinate CSV, or - for stdin")->required();
    rebuild->add_option("--epsilon", epsilon, "Merge distances closer than this (default 0)");

    auto* oracle = app.add_subcommand("oracle-check", "Cross-check the theory against brute force");
    oracle->add_option("--n", n, "Points per random space (<= 12)");
    oracle->add_option("--seeds", seeds, "Number of random spaces");
    oracle->add_option("--values", values, "Distinct merge heights (default: cycles 1..5)");
    oracle->add_option("--first-seed", first_seed, "First seed");
    oracle->add_flag("--json", json, "Print the JSON report");

    std::vector<std::string> argv_tail(args.rbegin(), args.rend() - 1);
    try {
        app.parse(argv_tail);
    } catch (const CLI::CallForHelp&) {
        io.out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            io.out << app.help();
            return kExitOk;
        }
        io.err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (validate->parsed()) {
            return cmd_validate(input, format, epsilon, json, io);
        }
        if (analyze->parsed()) {
            return cmd_analyze(input, format, epsilon, max_bases, json, io);
        }
        if (coords->parsed()) {
            return cmd_coords(input, format, epsilon, landmarks, automatic, io);
        }
        if (rebuild->parsed()) {
            return cmd_reconstruct(input, epsilon, io);
        }
        return cmd_oracle_check(n, seeds, values, first_seed, json, io);
    } catch (const InputError& e) {
        io.err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        io.err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

} // namespace ultrabase::cli
