#pragma once

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tdabands/errors.hpp"
#include "tdabands/format.hpp"

namespace tdabands {

// One finite (birth, death) interval. The planar representation is
// (midpoint, height) = ((b+d)/2, (d-b)/2).
struct PersistencePair {
    double birth = 0.0;
    double death = 0.0;

    double persistence() const { return death - birth; }
    double midpoint() const { return 0.5 * (birth + death); }
    double height() const { return 0.5 * (death - birth); }

    bool operator==(const PersistencePair&) const = default;
};

enum class EssentialPolicy { reject, truncate };

// T-bounded persistence diagram for a single homology dimension.
// Canonical form: every pair satisfies 0 <= birth < death <= t_bound
// (zero-persistence pairs are dropped on construction); duplicates are kept.
struct Diagram {
    std::vector<PersistencePair> pairs;
    double t_bound = 1.0;
    int dim = 0;
};

// Validates invariants, applies the essential-death policy, drops
// zero-persistence pairs. `where` prefixes error messages.
inline Diagram make_diagram(std::vector<PersistencePair> pairs, double t_bound, int dim,
                            EssentialPolicy policy = EssentialPolicy::reject,
                            const std::string& where = "diagram") {
    if (!(t_bound > 0.0)) throw ValidationError(where + ": t_bound must be > 0");
    if (dim < 0) throw ValidationError(where + ": dim must be >= 0");
    Diagram d;
    d.t_bound = t_bound;
    d.dim = dim;
    d.pairs.reserve(pairs.size());
    for (auto& p : pairs) {
        if (std::isinf(p.death)) {
            if (policy == EssentialPolicy::reject)
                throw ValidationError(where + ": essential pair (birth=" + format_double(p.birth) +
                                      ", death=inf) in dimension " + std::to_string(dim) +
                                      "; rerun with essential deaths truncated to t_bound");
            p.death = t_bound;
        }
        if (!(p.birth >= 0.0))
            throw ValidationError(where + ": birth must be >= 0, got " + format_double(p.birth));
        if (p.death < p.birth)
            throw ValidationError(where + ": death < birth in pair (" + format_double(p.birth) +
                                  ", " + format_double(p.death) + ")");
        if (p.death > t_bound)
            throw ValidationError(where + ": death " + format_double(p.death) +
                                  " exceeds t_bound " + format_double(t_bound));
        if (p.death > p.birth) d.pairs.push_back(p);
    }
    return d;
}

// CSV rows `dim,birth,death`; `#` comments and an optional header line are
// skipped; only rows of the requested dimension are kept.
inline Diagram parse_diagram(std::istream& in, double t_bound, int dim,
                             EssentialPolicy policy = EssentialPolicy::reject) {
    if (!(t_bound > 0.0)) throw ValidationError("parse_diagram: t_bound must be > 0");
    std::vector<PersistencePair> kept;
    std::string line;
    long lineno = 0;
    bool saw_row = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto fields = split_csv(body);
        const std::string where = "line " + std::to_string(lineno);
        if (!saw_row && fields.size() >= 1 && iequals(trim(fields[0]), "dim")) continue; // header
        if (fields.size() != 3)
            throw ParseError(where + ": expected 3 fields 'dim,birth,death', got " +
                             std::to_string(fields.size()));
        saw_row = true;
        long row_dim = parse_long(fields[0], where);
        if (row_dim < 0) throw ParseError(where + ": negative dimension");
        if (row_dim != dim) continue;
        PersistencePair p;
        p.birth = parse_double(fields[1], where);
        p.death = parse_double(fields[2], where);
        if (std::isinf(p.death) && policy == EssentialPolicy::reject)
            throw ValidationError(where + ": essential pair (death=inf); "
                                  "use truncation to map it to t_bound");
        if (std::isinf(p.death)) p.death = t_bound;
        if (!(p.birth >= 0.0)) throw ValidationError(where + ": birth must be >= 0");
        if (p.death < p.birth)
            throw ValidationError(where + ": death " + format_double(p.death) + " < birth " +
                                  format_double(p.birth));
        if (p.death > t_bound)
            throw ValidationError(where + ": death " + format_double(p.death) +
                                  " exceeds t_bound " + format_double(t_bound));
        if (p.death > p.birth) kept.push_back(p);
    }
    Diagram d;
    d.pairs = std::move(kept);
    d.t_bound = t_bound;
    d.dim = dim;
    return d;
}

inline Diagram parse_diagram(const std::string& text, double t_bound, int dim,
                             EssentialPolicy policy = EssentialPolicy::reject) {
    std::istringstream in(text);
    return parse_diagram(in, t_bound, dim, policy);
}

inline void write_diagram(const Diagram& d, std::ostream& out) {
    out << "dim,birth,death\n";
    for (const auto& p : d.pairs)
        out << d.dim << ',' << format_double(p.birth) << ',' << format_double(p.death) << '\n';
}

inline std::string write_diagram(const Diagram& d) {
    std::ostringstream out;
    write_diagram(d, out);
    return out.str();
}

} // namespace tdabands
