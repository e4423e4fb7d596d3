#pragma once

#include <algorithm>
#include <ostream>
#include <string>

#include <json.hpp>

#include "tdabands/format.hpp"
#include "tdabands/stats.hpp"
#include "tdabands/version.hpp"

namespace tdabands {

using ordered_json = nlohmann::ordered_json;

// Lower band clamped at zero for display; coverage math always uses the raw band.
inline ConfidenceBand clamp_lower_at_zero(ConfidenceBand band) {
    for (double& v : band.lower) v = std::max(0.0, v);
    return band;
}

inline ordered_json band_to_json(const BootstrapResult& r, int n, std::uint64_t seed,
                                 const ordered_json& meta = ordered_json::object(),
                                 bool clamp_zero = false) {
    const ConfidenceBand band = clamp_zero ? clamp_lower_at_zero(r.band) : r.band;
    ordered_json out;
    out["kind"] = to_string(band.kind);
    out["alpha"] = band.alpha;
    out["B"] = r.sup_stats.size();
    out["n"] = n;
    out["seed"] = seed;
    out["quantile"] = r.quantile;
    out["grid"] = {{"t_min", band.grid.t_min},
                   {"t_max", band.grid.t_max},
                   {"resolution", band.grid.resolution}};
    out["mean"] = r.mean.values;
    if (r.sigma) out["sigma_hat"] = r.sigma->values;
    out["lower"] = band.lower;
    out["upper"] = band.upper;
    out["theorem_region"] = {r.region_lo, r.region_hi};
    if (!meta.empty()) out["meta"] = meta;
    return out;
}

// CSV form: `t,mean,lower,upper` plus a sigma_hat column for adaptive bands.
inline void write_band_csv(const BootstrapResult& r, int n, std::uint64_t seed, std::ostream& out,
                           const std::vector<std::pair<std::string, std::string>>& extra = {},
                           bool clamp_zero = false) {
    const ConfidenceBand band = clamp_zero ? clamp_lower_at_zero(r.band) : r.band;
    out << "# tdabands-band\n";
    out << "# kind=" << to_string(band.kind) << '\n';
    out << "# alpha=" << format_double(band.alpha) << '\n';
    out << "# B=" << r.sup_stats.size() << '\n';
    out << "# n=" << n << '\n';
    out << "# seed=" << seed << '\n';
    out << "# quantile=" << format_double(r.quantile) << '\n';
    out << "# t_min=" << format_double(band.grid.t_min) << '\n';
    out << "# t_max=" << format_double(band.grid.t_max) << '\n';
    out << "# resolution=" << band.grid.resolution << '\n';
    out << "# theorem_region=" << r.region_lo << ':' << r.region_hi << '\n';
    for (const auto& [key, value] : extra) out << "# " << key << '=' << value << '\n';
    out << (r.sigma ? "t,mean,lower,upper,sigma_hat\n" : "t,mean,lower,upper\n");
    for (int j = 0; j < band.grid.resolution; ++j) {
        out << format_double(band.grid.node(j)) << ',' << format_double(r.mean.values[j]) << ','
            << format_double(band.lower[j]) << ',' << format_double(band.upper[j]);
        if (r.sigma) out << ',' << format_double(r.sigma->values[j]);
        out << '\n';
    }
}

} // namespace tdabands
