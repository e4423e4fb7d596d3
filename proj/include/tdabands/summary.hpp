#pragma once

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tdabands/errors.hpp"
#include "tdabands/format.hpp"
#include "tdabands/grid.hpp"

namespace tdabands {

enum class SummaryFamily { landscape, silhouette, mean, other };

struct SummaryKind {
    SummaryFamily family = SummaryFamily::other;
    int k = 0;          // landscape order, >= 1
    double power = 0.0; // silhouette power, > 0 or +inf

    static SummaryKind landscape(int k) {
        if (k < 1) throw ValidationError("landscape order k must be >= 1");
        return {SummaryFamily::landscape, k, 0.0};
    }
    static SummaryKind silhouette(double p) {
        if (!(p > 0.0)) throw ValidationError("silhouette power p must be > 0");
        return {SummaryFamily::silhouette, 0, p};
    }
    static SummaryKind mean() { return {SummaryFamily::mean, 0, 0.0}; }

    bool operator==(const SummaryKind&) const = default;

    std::string label() const {
        switch (family) {
            case SummaryFamily::landscape: return "landscape k=" + std::to_string(k);
            case SummaryFamily::silhouette:
                return std::isinf(power) ? "silhouette p=inf"
                                         : "silhouette p=" + format_double(power);
            case SummaryFamily::mean: return "mean";
            default: return "other";
        }
    }
};

// A summary function sampled on a Grid.
struct SummaryFunction {
    Grid grid;
    std::vector<double> values;
    SummaryKind kind;
};

inline SummaryFunction make_summary(Grid grid, std::vector<double> values, SummaryKind kind) {
    if (static_cast<int>(values.size()) != grid.resolution)
        throw ValidationError("summary: values length " + std::to_string(values.size()) +
                              " does not match grid resolution " +
                              std::to_string(grid.resolution));
    return {grid, std::move(values), kind};
}

// CSV layout:
//   # tdabands-summary
//   # kind=landscape
//   # k=2                (or p=... for silhouettes)
//   # t_min=0
//   # t_max=2
//   # resolution=5
//   # <extra metadata, ignored on parse>
//   t,value
//   0,0
inline void write_summary_csv(const SummaryFunction& f, std::ostream& out,
                              const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    out << "# tdabands-summary\n";
    switch (f.kind.family) {
        case SummaryFamily::landscape:
            out << "# kind=landscape\n# k=" << f.kind.k << '\n';
            break;
        case SummaryFamily::silhouette:
            out << "# kind=silhouette\n# p="
                << (std::isinf(f.kind.power) ? "inf" : format_double(f.kind.power)) << '\n';
            break;
        case SummaryFamily::mean: out << "# kind=mean\n"; break;
        default: out << "# kind=other\n"; break;
    }
    out << "# t_min=" << format_double(f.grid.t_min) << '\n';
    out << "# t_max=" << format_double(f.grid.t_max) << '\n';
    out << "# resolution=" << f.grid.resolution << '\n';
    for (const auto& [key, value] : extra) out << "# " << key << '=' << value << '\n';
    out << "t,value\n";
    for (int j = 0; j < f.grid.resolution; ++j)
        out << format_double(f.grid.node(j)) << ',' << format_double(f.values[j]) << '\n';
}

inline SummaryFunction parse_summary_csv(std::istream& in) {
    std::map<std::string, std::string, std::less<>> meta;
    std::vector<double> values;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body = trim(line);
        if (body.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (body.front() == '#') {
            body.remove_prefix(1);
            body = trim(body);
            auto eq = body.find('=');
            if (eq != std::string_view::npos)
                meta.emplace(std::string(trim(body.substr(0, eq))),
                             std::string(trim(body.substr(eq + 1))));
            continue;
        }
        auto fields = split_csv(body);
        if (iequals(trim(fields[0]), "t")) continue; // header row
        if (fields.size() != 2)
            throw ParseError(where + ": expected 't,value', got " +
                             std::to_string(fields.size()) + " fields");
        values.push_back(parse_double(fields[1], where));
    }
    auto require = [&](std::string_view key) -> const std::string& {
        auto it = meta.find(key);
        if (it == meta.end())
            throw ParseError("summary CSV: missing '# " + std::string(key) + "=...' header");
        return it->second;
    };
    Grid grid(parse_double(require("t_min"), "t_min"), parse_double(require("t_max"), "t_max"),
              static_cast<int>(parse_long(require("resolution"), "resolution")));
    const std::string& kind_name = require("kind");
    SummaryKind kind;
    if (kind_name == "landscape")
        kind = SummaryKind::landscape(static_cast<int>(parse_long(require("k"), "k")));
    else if (kind_name == "silhouette")
        kind = SummaryKind::silhouette(parse_double(require("p"), "p"));
    else if (kind_name == "mean")
        kind = SummaryKind::mean();
    else if (kind_name == "other")
        kind = SummaryKind{};
    else
        throw ParseError("summary CSV: unknown kind '" + kind_name + "'");
    return make_summary(grid, std::move(values), kind);
}

inline SummaryFunction parse_summary_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_summary_csv(in);
}

} // namespace tdabands
