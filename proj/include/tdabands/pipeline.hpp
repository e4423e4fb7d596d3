#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdabands/errors.hpp"
#include "tdabands/landscape.hpp"
#include "tdabands/parallel.hpp"
#include "tdabands/point_cloud.hpp"
#include "tdabands/random.hpp"
#include "tdabands/rips.hpp"
#include "tdabands/silhouette.hpp"
#include "tdabands/stats.hpp"
#include "tdabands/summary.hpp"

namespace tdabands {

inline SummaryFunction summarize(const Diagram& d, const SummaryKind& kind, const Grid& grid) {
    switch (kind.family) {
        case SummaryFamily::landscape: return landscape_on_grid(d, kind.k, grid);
        case SummaryFamily::silhouette:
            return silhouette_on_grid(d, SilhouetteParams(kind.power), grid);
        default: throw ValidationError("summarize: kind must be landscape or silhouette");
    }
}

// ---------------------------------------------------------------------------
// Scenario 2: repeated subsampling of one large point cloud.

struct SubsampleConfig {
    int subsample_size = 0; // m
    int repetitions = 0;    // n
    std::uint64_t seed = 0;
    double max_scale = 0.0;
    int dim = 1;
    SummaryKind summary = SummaryKind::landscape(1);
    Grid grid;
    double t_bound = 0.0;
    EssentialPolicy essential = EssentialPolicy::reject;
    bool with_replacement = false;
};

// Draws n subsamples of size m (per-repetition substreams of cfg.seed), runs
// each through Rips + persistence in cfg.dim, and evaluates the configured
// summary on the shared grid.
inline Sample subsample_summaries(const PointCloud& cloud, const SubsampleConfig& cfg,
                                  int threads = 1) {
    const auto population = cloud.size();
    if (cfg.subsample_size < 2 || static_cast<std::size_t>(cfg.subsample_size) > population)
        throw ValidationError("subsample: need 2 <= m <= cloud size (" +
                              std::to_string(population) + "), got m=" +
                              std::to_string(cfg.subsample_size));
    if (cfg.repetitions < 2) throw ValidationError("subsample: need n >= 2 repetitions");
    if (!(cfg.max_scale > 0.0)) throw ValidationError("subsample: max_scale must be > 0");
    if (!(cfg.t_bound > 0.0)) throw ValidationError("subsample: t_bound must be > 0");
    if (cfg.dim != 0 && cfg.dim != 1)
        throw ValidationError("subsample: homology dim must be 0 or 1");

    const int max_dim = std::min(cfg.dim + 1, 2);
    std::vector<SummaryFunction> functions(cfg.repetitions);
    parallel_for(cfg.repetitions, threads, [&](std::int64_t rep) {
        try {
            Rng rng(substream(cfg.seed, static_cast<std::uint64_t>(rep)));
            const auto indices =
                cfg.with_replacement
                    ? sample_with_replacement(rng, population, cfg.subsample_size)
                    : sample_without_replacement(rng, population, cfg.subsample_size);
            const PointCloud sub = subset(cloud, indices);
            const FilteredComplex complex = build_rips(sub, cfg.max_scale, max_dim);
            auto diagrams = compute_persistence(complex, cfg.t_bound, cfg.essential, {cfg.dim});
            functions[rep] = summarize(diagrams.at(cfg.dim), cfg.summary, cfg.grid);
        } catch (const std::exception& e) {
            throw ValidationError("repetition " + std::to_string(rep) + ": " + e.what());
        }
    });
    return make_sample(std::move(functions));
}

// ---------------------------------------------------------------------------
// Synthetic clouds and diagram generators for the coverage harness.

inline PointCloud sample_circle_cloud(Rng& rng, int points, double radius, double noise) {
    std::vector<std::vector<double>> pts(points);
    for (auto& p : pts) {
        const double angle = 2.0 * std::numbers::pi * rng.uniform01();
        p = {radius * std::cos(angle), radius * std::sin(angle)};
        if (noise > 0.0) {
            p[0] += noise * rng.normal();
            p[1] += noise * rng.normal();
        }
    }
    return make_point_cloud(pts);
}

// Two disjoint circles: radius r1 at the origin, radius r2 centered on the
// x-axis so the closest approach equals `gap`. Points split by circumference.
inline PointCloud sample_two_circles_cloud(Rng& rng, int points, double r1, double r2, double gap,
                                           double noise) {
    const int n2 = static_cast<int>(std::lround(points * r2 / (r1 + r2)));
    const double cx = r1 + gap + r2;
    std::vector<std::vector<double>> pts(points);
    for (int i = 0; i < points; ++i) {
        const bool second = i >= points - n2;
        const double r = second ? r2 : r1;
        const double angle = 2.0 * std::numbers::pi * rng.uniform01();
        pts[i] = {(second ? cx : 0.0) + r * std::cos(angle), r * std::sin(angle)};
        if (noise > 0.0) {
            pts[i][0] += noise * rng.normal();
            pts[i][1] += noise * rng.normal();
        }
    }
    return make_point_cloud(pts);
}

struct GeneratorSpec {
    enum class Kind { single_pair, circle, two_circles };
    Kind kind = Kind::single_pair;
    // single_pair: one interval (birth, U), U ~ Uniform[death_min, death_max].
    double birth = 0.0;
    double death_min = 1.0;
    double death_max = 2.0;
    // cloud kinds
    int points = 60;
    double radius = 1.0;  // circle radius, or first of the two circles
    double radius2 = 2.0; // two_circles only
    double gap = 1.0;     // two_circles only
    double noise = 0.0;
    double max_scale = 2.0;
    int dim = 1;

    double t_bound() const { return kind == Kind::single_pair ? death_max : max_scale; }

    std::string to_string() const {
        switch (kind) {
            case Kind::single_pair:
                return "pair:birth=" + format_double(birth) + ",dmin=" + format_double(death_min) +
                       ",dmax=" + format_double(death_max);
            case Kind::circle:
                return "circle:points=" + std::to_string(points) +
                       ",radius=" + format_double(radius) + ",noise=" + format_double(noise) +
                       ",max_scale=" + format_double(max_scale) + ",dim=" + std::to_string(dim);
            default:
                return "two_circles:points=" + std::to_string(points) +
                       ",r1=" + format_double(radius) + ",r2=" + format_double(radius2) +
                       ",gap=" + format_double(gap) + ",noise=" + format_double(noise) +
                       ",max_scale=" + format_double(max_scale) + ",dim=" + std::to_string(dim);
        }
    }

    void validate() const {
        if (kind == Kind::single_pair) {
            if (!(birth >= 0.0)) throw ValidationError("generator: birth must be >= 0");
            if (!(death_min >= birth) || !(death_max >= death_min) || !(death_max > 0.0))
                throw ValidationError("generator: need birth <= dmin <= dmax and dmax > 0");
        } else {
            if (points < 2) throw ValidationError("generator: points must be >= 2");
            if (!(radius > 0.0)) throw ValidationError("generator: radius must be > 0");
            if (!(max_scale > 0.0)) throw ValidationError("generator: max_scale must be > 0");
            if (noise < 0.0) throw ValidationError("generator: noise must be >= 0");
            if (dim != 0 && dim != 1) throw ValidationError("generator: dim must be 0 or 1");
            if (kind == Kind::two_circles && (!(radius2 > 0.0) || !(gap > 0.0)))
                throw ValidationError("generator: need r2 > 0 and gap > 0");
        }
    }

    // "pair:dmin=1,dmax=2" / "circle:points=40,radius=1,..." /
    // "two_circles:points=80,r1=1,r2=2,gap=1,noise=0.05,max_scale=4"
    static GeneratorSpec parse(std::string_view text) {
        GeneratorSpec spec;
        std::string_view name = text;
        std::string_view args;
        if (auto colon = text.find(':'); colon != std::string_view::npos) {
            name = text.substr(0, colon);
            args = text.substr(colon + 1);
        }
        if (name == "pair" || name == "single_pair") spec.kind = Kind::single_pair;
        else if (name == "circle") spec.kind = Kind::circle;
        else if (name == "two_circles") spec.kind = Kind::two_circles;
        else throw ValidationError("generator: unknown kind '" + std::string(name) + "'");
        while (!args.empty()) {
            auto comma = args.find(',');
            std::string_view item = args.substr(0, comma);
            args = comma == std::string_view::npos ? std::string_view{} : args.substr(comma + 1);
            auto eq = item.find('=');
            if (eq == std::string_view::npos)
                throw ValidationError("generator: expected key=value, got '" + std::string(item) +
                                      "'");
            const std::string key{trim(item.substr(0, eq))};
            const std::string_view value = trim(item.substr(eq + 1));
            const std::string where = "generator " + key;
            if (key == "birth") spec.birth = parse_double(value, where);
            else if (key == "dmin") spec.death_min = parse_double(value, where);
            else if (key == "dmax") spec.death_max = parse_double(value, where);
            else if (key == "points") spec.points = static_cast<int>(parse_long(value, where));
            else if (key == "radius" || key == "r1") spec.radius = parse_double(value, where);
            else if (key == "r2") spec.radius2 = parse_double(value, where);
            else if (key == "gap") spec.gap = parse_double(value, where);
            else if (key == "noise") spec.noise = parse_double(value, where);
            else if (key == "max_scale") spec.max_scale = parse_double(value, where);
            else if (key == "dim") spec.dim = static_cast<int>(parse_long(value, where));
            else throw ValidationError("generator: unknown key '" + key + "'");
        }
        spec.validate();
        return spec;
    }
};

inline Diagram draw_diagram(const GeneratorSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    if (spec.kind == GeneratorSpec::Kind::single_pair) {
        const double death = rng.uniform(spec.death_min, spec.death_max);
        return make_diagram({{spec.birth, death}}, spec.t_bound(), spec.dim);
    }
    const PointCloud cloud =
        spec.kind == GeneratorSpec::Kind::circle
            ? sample_circle_cloud(rng, spec.points, spec.radius, spec.noise)
            : sample_two_circles_cloud(rng, spec.points, spec.radius, spec.radius2, spec.gap,
                                       spec.noise);
    const FilteredComplex complex = build_rips(cloud, spec.max_scale, std::min(spec.dim + 1, 2));
    auto diagrams =
        compute_persistence(complex, spec.t_bound(), EssentialPolicy::truncate, {spec.dim});
    return diagrams.at(spec.dim);
}

// ---------------------------------------------------------------------------
// Monte Carlo coverage harness.

struct CoverageConfig {
    GeneratorSpec generator;
    SummaryKind summary = SummaryKind::landscape(1);
    Grid grid{0.0, 1.0, 2};
    std::vector<int> n_values = {30};
    int rounds = 200;      // R
    int mu_draws = 100000; // M
    double alpha = 0.05;
    int replicates = 1000; // B
    std::vector<BandKind> kinds = {BandKind::uniform, BandKind::adaptive};
    std::uint64_t seed = 0;
    // The theorem region is the largest contiguous node run where the
    // Monte Carlo sigma exceeds this fraction of its peak. The studentized
    // approximation needs sigma solidly bounded away from zero at small n;
    // 0.4 keeps desk-scale runs inside the regime the bands are built for.
    double region_rel_threshold = 0.4;
    std::optional<double> variance_floor;
};

struct CoverageReport {
    nlohmann::ordered_json config_echo;
    int rounds = 0;
    std::vector<double> mu;
    std::vector<double> sigma;
    int region_lo = -1;
    int region_hi = -1;
    // keyed by band kind name, then by n
    std::map<std::string, std::map<int, double>> coverage;
    std::map<std::string, std::map<int, double>> coverage_se;
    std::map<std::string, std::map<int, double>> median_width;

    bool operator==(const CoverageReport&) const = default;
};

inline nlohmann::ordered_json coverage_config_to_json(const CoverageConfig& cfg) {
    nlohmann::ordered_json j;
    j["generator"] = cfg.generator.to_string();
    j["summary"] = cfg.summary.label();
    j["grid"] = {{"t_min", cfg.grid.t_min},
                 {"t_max", cfg.grid.t_max},
                 {"resolution", cfg.grid.resolution}};
    j["n"] = cfg.n_values;
    j["R"] = cfg.rounds;
    j["M"] = cfg.mu_draws;
    j["alpha"] = cfg.alpha;
    j["B"] = cfg.replicates;
    std::vector<std::string> kind_names;
    for (auto k : cfg.kinds) kind_names.push_back(to_string(k));
    j["bands"] = kind_names;
    j["seed"] = cfg.seed;
    j["region_rel_threshold"] = cfg.region_rel_threshold;
    if (cfg.variance_floor) j["variance_floor"] = *cfg.variance_floor;
    return j;
}

namespace detail {

// Slack for the per-node band membership test. Covers the accumulation
// round-off that would otherwise break exact containment for degenerate
// (zero-width) bands; it is far below any meaningful band width.
inline constexpr double kCoverageSlack = 1e-12;

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace detail

// Estimates mu and sigma from M independent draws, then runs R rounds of
// (draw n summaries, build bands, test whether mu lies inside everywhere on
// the theorem region). All randomness is counter-derived from cfg.seed, so
// the report is identical for every thread count.
inline CoverageReport coverage_experiment(const CoverageConfig& cfg, int threads = 1) {
    cfg.generator.validate();
    if (cfg.rounds < 50) throw ValidationError("coverage: need R >= 50 rounds");
    if (cfg.n_values.empty()) throw ValidationError("coverage: need at least one n");
    int max_n = 0;
    for (int n : cfg.n_values) {
        if (n < 2) throw ValidationError("coverage: every n must be >= 2");
        max_n = std::max(max_n, n);
    }
    if (cfg.mu_draws < std::max(100, 2 * max_n))
        throw ValidationError("coverage: M must be >> n (at least max(100, 2n))");
    if (cfg.kinds.empty()) throw ValidationError("coverage: need at least one band kind");
    if (!(cfg.grid.t_max <= cfg.generator.t_bound() + 1e-12))
        throw ValidationError("coverage: grid extends past the generator's t_bound");

    const int res = cfg.grid.resolution;
    const std::uint64_t mu_key = substream(cfg.seed, 0);
    const std::uint64_t rounds_key = substream(cfg.seed, 1);

    // Ground truth in fixed-size chunks: the chunk partials are reduced in
    // index order, so the totals do not depend on the thread count.
    const int chunks = 256;
    std::vector<std::vector<double>> part_sum(chunks), part_sq(chunks);
    parallel_for(chunks, threads, [&](std::int64_t c) {
        std::vector<double> sum(res, 0.0), sq(res, 0.0);
        const std::int64_t lo = c * cfg.mu_draws / chunks;
        const std::int64_t hi = (c + 1) * cfg.mu_draws / chunks;
        for (std::int64_t d = lo; d < hi; ++d) {
            const Diagram diagram =
                draw_diagram(cfg.generator, substream(mu_key, static_cast<std::uint64_t>(d)));
            const SummaryFunction f = summarize(diagram, cfg.summary, cfg.grid);
            for (int j = 0; j < res; ++j) {
                sum[j] += f.values[j];
                sq[j] += f.values[j] * f.values[j];
            }
        }
        part_sum[c] = std::move(sum);
        part_sq[c] = std::move(sq);
    });
    CoverageReport report;
    report.config_echo = coverage_config_to_json(cfg);
    report.rounds = cfg.rounds;
    report.mu.assign(res, 0.0);
    report.sigma.assign(res, 0.0);
    for (int c = 0; c < chunks; ++c) {
        for (int j = 0; j < res; ++j) {
            report.mu[j] += part_sum[c][j];
            report.sigma[j] += part_sq[c][j];
        }
    }
    double sigma_max = 0.0;
    for (int j = 0; j < res; ++j) {
        const double m = report.mu[j] / cfg.mu_draws;
        report.mu[j] = m;
        report.sigma[j] = std::sqrt(std::max(0.0, report.sigma[j] / cfg.mu_draws - m * m));
        sigma_max = std::max(sigma_max, report.sigma[j]);
    }

    // Largest contiguous run with sigma above the relative threshold.
    const double threshold = cfg.region_rel_threshold * sigma_max;
    int best_lo = -1, best_hi = -2;
    for (int j = 0; j < res;) {
        if (report.sigma[j] > threshold && sigma_max > 0.0) {
            int k = j;
            while (k + 1 < res && report.sigma[k + 1] > threshold) ++k;
            if (k - j > best_hi - best_lo) {
                best_lo = j;
                best_hi = k;
            }
            j = k + 1;
        } else {
            ++j;
        }
    }
    report.region_lo = best_lo < 0 ? -1 : best_lo;
    report.region_hi = best_lo < 0 ? -1 : best_hi;
    const int check_lo = report.region_lo < 0 ? 0 : report.region_lo;
    const int check_hi = report.region_lo < 0 ? res - 1 : report.region_hi;

    struct RoundOutcome {
        bool covered = false;
        double width = 0.0;
    };
    const auto n_count = cfg.n_values.size();
    const auto kind_count = cfg.kinds.size();
    std::vector<RoundOutcome> outcomes(n_count * cfg.rounds * kind_count);

    parallel_for(static_cast<std::int64_t>(n_count) * cfg.rounds, threads, [&](std::int64_t task) {
        const std::size_t ni = static_cast<std::size_t>(task) / cfg.rounds;
        const int round = static_cast<int>(task % cfg.rounds);
        const int n = cfg.n_values[ni];
        const std::uint64_t round_key = substream(substream(rounds_key, ni), round);
        const std::uint64_t draw_key = substream(round_key, 0);
        const std::uint64_t boot_key = substream(round_key, 1);

        std::vector<SummaryFunction> fns(n);
        for (int i = 0; i < n; ++i) {
            const Diagram d = draw_diagram(cfg.generator, substream(draw_key, i));
            fns[i] = summarize(d, cfg.summary, cfg.grid);
        }
        const Sample sample = make_sample(std::move(fns));

        for (std::size_t ki = 0; ki < kind_count; ++ki) {
            BootstrapConfig bc;
            bc.alpha = cfg.alpha;
            bc.replicates = cfg.replicates;
            bc.seed = boot_key;
            bc.kind = cfg.kinds[ki];
            bc.variance_floor = cfg.variance_floor;
            const BootstrapResult r = confidence_band(sample, bc, 1);

            bool covered = true;
            for (int j = check_lo; j <= check_hi; ++j) {
                if (report.mu[j] < r.band.lower[j] - detail::kCoverageSlack ||
                    report.mu[j] > r.band.upper[j] + detail::kCoverageSlack) {
                    covered = false;
                    break;
                }
            }
            double width;
            if (cfg.kinds[ki] == BandKind::uniform) {
                width = 2.0 * r.quantile / std::sqrt(static_cast<double>(n));
            } else {
                std::vector<double> w;
                w.reserve(check_hi - check_lo + 1);
                for (int j = check_lo; j <= check_hi; ++j)
                    w.push_back(r.band.upper[j] - r.band.lower[j]);
                width = detail::median(std::move(w));
            }
            outcomes[(ni * cfg.rounds + round) * kind_count + ki] = {covered, width};
        }
    });

    for (std::size_t ki = 0; ki < kind_count; ++ki) {
        const std::string kind_name = to_string(cfg.kinds[ki]);
        for (std::size_t ni = 0; ni < n_count; ++ni) {
            int hits = 0;
            std::vector<double> widths(cfg.rounds);
            for (int round = 0; round < cfg.rounds; ++round) {
                const auto& o = outcomes[(ni * cfg.rounds + round) * kind_count + ki];
                hits += o.covered ? 1 : 0;
                widths[round] = o.width;
            }
            const double cov = static_cast<double>(hits) / cfg.rounds;
            report.coverage[kind_name][cfg.n_values[ni]] = cov;
            report.coverage_se[kind_name][cfg.n_values[ni]] =
                std::sqrt(cov * (1.0 - cov) / cfg.rounds);
            report.median_width[kind_name][cfg.n_values[ni]] = detail::median(std::move(widths));
        }
    }
    return report;
}

inline nlohmann::ordered_json coverage_report_to_json(const CoverageReport& report) {
    nlohmann::ordered_json j;
    j["config"] = report.config_echo;
    j["rounds"] = report.rounds;
    j["mu_estimate"] = report.mu;
    j["sigma_estimate"] = report.sigma;
    j["theorem_region"] = {report.region_lo, report.region_hi};
    auto table = [](const std::map<std::string, std::map<int, double>>& src) {
        nlohmann::ordered_json out = nlohmann::ordered_json::object();
        for (const auto& [kind, by_n] : src) {
            nlohmann::ordered_json inner = nlohmann::ordered_json::object();
            for (const auto& [n, value] : by_n) inner[std::to_string(n)] = value;
            out[kind] = std::move(inner);
        }
        return out;
    };
    j["coverage"] = table(report.coverage);
    j["coverage_se"] = table(report.coverage_se);
    j["widths"] = table(report.median_width);
    return j;
}

inline CoverageReport coverage_report_from_json(const nlohmann::ordered_json& j) {
    CoverageReport report;
    report.config_echo = j.at("config");
    report.rounds = j.at("rounds").get<int>();
    report.mu = j.at("mu_estimate").get<std::vector<double>>();
    report.sigma = j.at("sigma_estimate").get<std::vector<double>>();
    report.region_lo = j.at("theorem_region").at(0).get<int>();
    report.region_hi = j.at("theorem_region").at(1).get<int>();
    auto table = [](const nlohmann::ordered_json& src) {
        std::map<std::string, std::map<int, double>> out;
        for (auto it = src.begin(); it != src.end(); ++it)
            for (auto inner = it.value().begin(); inner != it.value().end(); ++inner)
                out[it.key()][std::stoi(inner.key())] = inner.value().get<double>();
        return out;
    };
    report.coverage = table(j.at("coverage"));
    report.coverage_se = table(j.at("coverage_se"));
    report.median_width = table(j.at("widths"));
    return report;
}

} // namespace tdabands
