// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "tdabands/pipeline.hpp"

#include "support/generators.hpp"
#include "support/naive_persistence.hpp"

namespace fs = std::filesystem;
using namespace tdabands;
using tdabands::testing::naive_persistence;
using tdabands::testing::random_diagram;
using tdabands::testing::random_small_cloud;
using tdabands::testing::same_diagram;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        ok = false;
        if (detail.empty()) detail = why;
    }
    void require(bool condition, const std::string& why) {
        if (!condition) fail(why);
    }
};

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// --- 1. persistence vs the naive full-reduction oracle ---------------------

void criterion_persistence_oracle(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(0xACCE01);
    for (int trial = 0; trial < 100; ++trial) {
        const auto cloud = random_small_cloud(rng, 8);
        const double scale = rng.uniform(0.2, 2.2);
        const auto complex = build_rips(cloud, scale, 2);
        const double t_bound = scale + 0.5;
        const auto fast = compute_persistence(complex, t_bound, EssentialPolicy::truncate);
        const auto slow = naive_persistence(complex, t_bound, EssentialPolicy::truncate);
        c.require(same_diagram(fast.at(0), slow.at(0)),
                  "H0 mismatch with oracle at trial " + std::to_string(trial));
        c.require(same_diagram(fast.at(1), slow.at(1)),
                  "H1 mismatch with oracle at trial " + std::to_string(trial));
        if (!c.ok) return;
    }

    const auto square = make_point_cloud({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const auto diagrams =
        compute_persistence(build_rips(square, 2.0, 2), 2.0, EssentialPolicy::truncate);
    const auto& h1 = diagrams.at(1);
    c.require(h1.pairs.size() == 1, "unit square H1 should have one bar");
    if (!h1.pairs.empty()) {
        c.require(std::abs(h1.pairs[0].birth - 1.0) <= 1e-9, "unit square H1 birth");
        c.require(std::abs(h1.pairs[0].death - std::sqrt(2.0)) <= 1e-9, "unit square H1 death");
    }
    const double secs = elapsed_s(start);
    c.require(secs < 10.0, "runtime " + std::to_string(secs) + "s exceeds 10s");
    if (c.ok) c.detail = "100 clouds vs oracle, square H1=(1,sqrt2), " +
                         std::to_string(secs).substr(0, 4) + "s";
}

// --- 2. landscape properties ------------------------------------------------

double kth_by_sorting(const Diagram& d, int k, double t) {
    if (static_cast<int>(d.pairs.size()) < k) return 0.0;
    std::vector<double> vals;
    for (const auto& p : d.pairs) vals.push_back(triangle(p, t));
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    return vals[k - 1];
}

void criterion_landscape_properties(Check& c) {
    Rng rng(0xACCE02);
    const double t_bound = 4.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Diagram d = random_diagram(rng, 50, t_bound);
        const double t = rng.uniform(-0.5, t_bound + 0.5);
        const double s = rng.uniform(-0.5, t_bound + 0.5);
        const int k = 1 + static_cast<int>(rng.below(6));

        const double lk = landscape_at(d, k, t);
        const double lk1 = landscape_at(d, k + 1, t);
        c.require(lk >= lk1 && lk1 >= 0.0, "landscape ordering violated");
        c.require(std::abs(lk - landscape_at(d, k, s)) <= std::abs(t - s) + 1e-12,
                  "landscape Lipschitz violated");
        c.require(lk == kth_by_sorting(d, k, t), "selection differs from sort oracle");
        if (!c.ok) return;
    }
    c.detail = "1000 diagrams: ordering, 1-Lipschitz, sort-oracle equality";
}

// --- 3. silhouette properties -----------------------------------------------

void criterion_silhouette_properties(Check& c) {
    Rng rng(0xACCE03);
    const double t_bound = 4.0;
    for (int trial = 0; trial < 1000; ++trial) {
        Diagram d = random_diagram(rng, 50, t_bound);
        if (trial % 5 == 0) {
            // equal-persistence corpus: p must not matter
            const double pers = rng.uniform(0.2, 1.0);
            std::vector<PersistencePair> pairs;
            const int m = 1 + static_cast<int>(rng.below(10));
            for (int i = 0; i < m; ++i) {
                const double birth = rng.uniform(0.0, t_bound - pers);
                pairs.push_back({birth, birth + pers});
            }
            d = make_diagram(pairs, t_bound, 1);
            const double t = rng.uniform(0.0, t_bound);
            const double base = silhouette_at(d, SilhouetteParams(1.0), t);
            for (double p : {0.1, 2.0, 10.0})
                c.require(std::abs(silhouette_at(d, SilhouetteParams(p), t) - base) <= 1e-12,
                          "equal persistences should cancel the power");
            continue;
        }
        if (d.pairs.empty()) continue;
        const double p = std::exp(rng.uniform(std::log(0.05), std::log(20.0)));
        const double t = rng.uniform(0.0, t_bound);
        const double s = rng.uniform(0.0, t_bound);
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& pr : d.pairs) lo = std::min(lo, triangle(pr, t));
        const double phi = silhouette_at(d, SilhouetteParams(p), t);
        c.require(phi >= lo - 1e-12 && phi <= landscape_at(d, 1, t) + 1e-12,
                  "silhouette outside its convex bounds");
        c.require(std::abs(phi - silhouette_at(d, SilhouetteParams(p), s)) <=
                      std::abs(t - s) + 1e-12,
                  "silhouette Lipschitz violated");
        if (!c.ok) return;
    }

    const Diagram skew = make_diagram({{0.0, 4.0}, {1.0, 2.0}}, 4.0, 1);
    const Grid grid(0.0, 4.0, 1001);
    const auto f = silhouette_on_grid(skew, SilhouetteParams(50.0), grid);
    double sup = 0.0;
    for (int j = 0; j < grid.resolution; ++j)
        sup = std::max(sup, std::abs(f.values[j] - triangle({0.0, 4.0}, grid.node(j))));
    c.require(sup <= 0.05, "p=50 silhouette strays from the dominant triangle");
    if (c.ok) c.detail = "1000 diagrams: bounds, 1-Lipschitz, p-invariance, p=50 dominance";
}

// --- 4. bootstrap algebra -----------------------------------------------------

void criterion_bootstrap_algebra(Check& c) {
    c.require(empirical_quantile({1, 2, 3, 4}, 0.25) == 3.0, "quantile({1..4},0.25) != 3");
    c.require(empirical_quantile({1, 2, 3, 4}, 0.5) == 2.0, "quantile({1..4},0.5) != 2");

    const Grid grid(0.0, 2.0, 9);
    auto fn = [&](std::vector<double> v) {
        return make_summary(grid, std::move(v), SummaryKind::landscape(1));
    };
    const std::vector<double> base{0.0, 0.1, 0.4, 0.9, 1.0, 0.9, 0.4, 0.1, 0.0};
    const auto identical = make_sample({fn(base), fn(base)});
    BootstrapConfig cfg;
    cfg.replicates = 128;
    cfg.seed = 4;
    const auto collapsed = confidence_band(identical, cfg);
    c.require(collapsed.quantile == 0.0, "identical sample should give a zero quantile");
    c.require(collapsed.band.lower == collapsed.mean.values &&
                  collapsed.band.upper == collapsed.mean.values,
              "identical sample band should collapse onto the mean");

    Rng rng(0xACCE04);
    std::vector<SummaryFunction> fns;
    const int n = 10;
    for (int i = 0; i < n; ++i) {
        std::vector<double> v(grid.resolution, 0.0);
        for (int j = 1; j + 1 < grid.resolution; ++j) v[j] = rng.uniform01();
        fns.push_back(fn(std::move(v)));
    }
    const auto sample = make_sample(std::move(fns));
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    cfg.replicates = 500;
    cfg.kind = BandKind::uniform;
    const auto uniform = confidence_band(sample, cfg);
    for (int j = 0; j < grid.resolution; ++j) {
        const double width = uniform.band.upper[j] - uniform.band.lower[j];
        c.require(std::abs(width - 2.0 * uniform.quantile / sqrt_n) <=
                      1e-12 * std::max(1.0, width),
                  "uniform width != 2 Z / sqrt(n)");
    }

    cfg.kind = BandKind::adaptive;
    const auto adaptive = confidence_band(sample, cfg);
    const double floor = cfg.resolved_floor(grid);
    for (int j = 0; j < grid.resolution; ++j) {
        const double sig = adaptive.sigma->values[j];
        if (!(sig > floor)) continue;
        const double width = adaptive.band.upper[j] - adaptive.band.lower[j];
        c.require(std::abs(width - 2.0 * adaptive.quantile * sig / sqrt_n) <=
                      1e-12 * std::max(1.0, width),
                  "adaptive width != 2 Q sigma / sqrt(n)");
    }
    if (c.ok) c.detail = "quantiles, collapsed band, exact width identities";
}

// --- 5. coverage simulation ---------------------------------------------------

void criterion_coverage(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    CoverageConfig cfg;
    cfg.generator = GeneratorSpec::parse("pair:birth=0,dmin=1,dmax=2");
    cfg.summary = SummaryKind::landscape(1);
    cfg.grid = Grid(0.0, 2.0, 1001);
    cfg.n_values = {30};
    cfg.rounds = 200;
    cfg.mu_draws = 100000;
    cfg.alpha = 0.05;
    cfg.replicates = 1000;
    cfg.kinds = {BandKind::uniform, BandKind::adaptive};
    cfg.seed = 0xACCE05;
    const auto report = coverage_experiment(cfg, default_thread_count());
    const double uniform_cov = report.coverage.at("uniform").at(30);
    const double adaptive_cov = report.coverage.at("adaptive").at(30);
    c.require(uniform_cov >= 0.90 && uniform_cov <= 0.995,
              "uniform coverage " + std::to_string(uniform_cov) + " outside [0.90, 0.995]");
    c.require(adaptive_cov >= 0.90 && adaptive_cov <= 0.995,
              "adaptive coverage " + std::to_string(adaptive_cov) + " outside [0.90, 0.995]");
    const double secs = elapsed_s(start);
    c.require(secs < 300.0, "runtime " + std::to_string(secs) + "s exceeds 5 minutes");
    if (c.ok)
        c.detail = "uniform " + std::to_string(uniform_cov) + ", adaptive " +
                   std::to_string(adaptive_cov) + " at 1-alpha=0.95, R=200, " +
                   std::to_string(secs).substr(0, 5) + "s";
}

// --- 6. width scaling -----------------------------------------------------------

void criterion_width_scaling(Check& c) {
    CoverageConfig cfg;
    cfg.generator = GeneratorSpec::parse("pair:birth=0,dmin=1,dmax=2");
    cfg.summary = SummaryKind::landscape(1);
    cfg.grid = Grid(0.0, 2.0, 241);
    cfg.n_values = {25, 50, 100, 200, 400};
    cfg.rounds = 60;
    cfg.mu_draws = 20000;
    cfg.alpha = 0.05;
    cfg.replicates = 400;
    cfg.kinds = {BandKind::uniform};
    cfg.seed = 0xACCE06;
    const auto report = coverage_experiment(cfg, default_thread_count());

    std::vector<double> xs, ys;
    for (int n : cfg.n_values) {
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(report.median_width.at("uniform").at(n)));
    }
    const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
        sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    }
    const double slope = sxy / sxx;
    c.require(slope >= -0.6 && slope <= -0.4,
              "slope " + std::to_string(slope) + " outside [-0.6, -0.4]");
    if (c.ok) c.detail = "log-width slope " + std::to_string(slope) + " over n in {25..400}";
}

// --- 7. CLI determinism across seeds and thread counts ---------------------------

const std::string kCli = TDABANDS_CLI_PATH;

bool shell(const std::string& command) {
    const int status = std::system((command + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void criterion_determinism(Check& c) {
    const fs::path dir = fs::temp_directory_path() / "tdabands_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir / "summaries");

    // inputs: a ring cloud and a few summary files
    {
        std::ostringstream cloud;
        Rng rng(0xACCE07);
        const auto ring = sample_circle_cloud(rng, 40, 1.0, 0.05);
        for (std::size_t i = 0; i < ring.size(); ++i)
            cloud << format_double(ring.point(i)[0]) << ',' << format_double(ring.point(i)[1])
                  << '\n';
        std::ofstream(dir / "ring.csv") << cloud.str();
    }
    for (int i = 0; i < 6; ++i) {
        std::ofstream(dir / ("d" + std::to_string(i) + ".csv"))
            << "1,0," << format_double(1.0 + 0.15 * i) << "\n";
        if (!shell(kCli + " landscape --input " + (dir / ("d" + std::to_string(i) + ".csv")).string() +
                   " --k 1 --t-bound 2 --t-max 2 --grid 33 --output " +
                   (dir / "summaries" / ("s" + std::to_string(i) + ".csv")).string())) {
            c.fail("landscape subcommand failed");
            return;
        }
    }

    const std::vector<std::pair<std::string, std::string>> runs = {
        {"rips", kCli + " rips --input " + (dir / "ring.csv").string() +
                     " --max-scale 2 --dim 1 --t-bound 2 --truncate-essential --output OUT"},
        {"landscape", kCli + " landscape --input " + (dir / "d0.csv").string() +
                          " --k 1 --t-bound 2 --grid 257 --output OUT"},
        {"silhouette", kCli + " silhouette --input " + (dir / "d0.csv").string() +
                           " --p 0.5 --t-bound 2 --grid 257 --output OUT"},
        {"mean", kCli + " mean --input-dir " + (dir / "summaries").string() + " --output OUT"},
        {"band", kCli + " band --input-dir " + (dir / "summaries").string() +
                     " --alpha 0.05 --B 300 --seed 7 --band adaptive --output OUT"},
        {"subsample", kCli + " subsample --input " + (dir / "ring.csv").string() +
                          " --m 25 --n 8 --seed 11 --max-scale 2 --dim 1 --summary silhouette"
                          " --p 0.5 --grid 65 --alpha 0.1 --B 200 --band uniform"
                          " --truncate-essential --output OUT"},
        {"coverage", kCli + " coverage --generator pair:dmin=1,dmax=2 --summary landscape --k 1"
                         " --n 8 --R 50 --M 500 --B 60 --grid 41 --seed 3 --output OUT"},
    };
    for (const auto& [name, tmpl] : runs) {
        std::vector<std::string> outputs;
        int variant = 0;
        for (const std::string threads : {"1", "8", "1"}) {
            const fs::path out =
                dir / (name + "_v" + std::to_string(variant++) + ".out");
            std::string cmd = tmpl;
            cmd.replace(cmd.find("OUT"), 3, out.string());
            cmd += " --threads " + threads;
            if (!shell(cmd)) {
                c.fail(name + " run failed");
                return;
            }
            outputs.push_back(slurp(out));
        }
        c.require(!outputs[0].empty(), name + " produced empty output");
        c.require(outputs[0] == outputs[1] && outputs[1] == outputs[2],
                  name + " output differs across runs or thread counts");
        if (!c.ok) return;
    }
    c.detail = "all 7 subcommands byte-identical across reruns at --threads 1 and 8";
}

// --- 8. two disjoint circles, second cycle visible --------------------------------

void criterion_two_circles(Check& c) {
    Rng cloud_rng(0xACCE08);
    const PointCloud cloud = sample_two_circles_cloud(cloud_rng, 600, 1.0, 2.0, 1.0, 0.05);
    const double max_scale = 4.0;
    const Grid grid(0.0, max_scale, 201);
    const int n = 30, m = 200;
    const std::uint64_t seed = 0xACCE09;

    std::vector<SummaryFunction> land2(n), silh_small(n), silh_large(n);
    parallel_for(n, default_thread_count(), [&](std::int64_t rep) {
        Rng rng(substream(seed, rep));
        const auto idx = sample_without_replacement(rng, cloud.size(), m);
        const auto complex = build_rips(subset(cloud, idx), max_scale, 2);
        const auto diagram =
            compute_persistence(complex, max_scale, EssentialPolicy::truncate, {1}).at(1);
        land2[rep] = landscape_on_grid(diagram, 2, grid);
        silh_small[rep] = silhouette_on_grid(diagram, SilhouetteParams(0.1), grid);
        silh_large[rep] = silhouette_on_grid(diagram, SilhouetteParams(4.0), grid);
    });

    const auto mean2 = mean_summary(make_sample(std::move(land2)));
    const double peak2 = *std::max_element(mean2.values.begin(), mean2.values.end());
    c.require(peak2 > 1e-9, "second landscape never positive: no second cycle detected");

    // positive support at a relative threshold of each curve's own peak
    auto support_nodes = [&](const SummaryFunction& f) {
        const double peak = *std::max_element(f.values.begin(), f.values.end());
        int count = 0;
        for (double v : f.values)
            if (v > 1e-3 * peak) ++count;
        return count;
    };
    const auto mean_small = mean_summary(make_sample(std::move(silh_small)));
    const auto mean_large = mean_summary(make_sample(std::move(silh_large)));
    const int wide = support_nodes(mean_small);
    const int narrow = support_nodes(mean_large);
    c.require(wide > narrow, "p=0.1 support (" + std::to_string(wide) +
                                 " nodes) not wider than p=4 (" + std::to_string(narrow) + ")");
    if (c.ok)
        c.detail = "second landscape peak " + std::to_string(peak2).substr(0, 6) +
                   ", support p=0.1: " + std::to_string(wide) + " nodes vs p=4: " +
                   std::to_string(narrow);
}

} // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        std::function<void(Check&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "persistence equals the naive reduction oracle", criterion_persistence_oracle},
        {2, "landscape properties", criterion_landscape_properties},
        {3, "silhouette properties", criterion_silhouette_properties},
        {4, "bootstrap algebra", criterion_bootstrap_algebra},
        {5, "coverage simulation (uniform and adaptive)", criterion_coverage},
        {6, "band width scaling in n", criterion_width_scaling},
        {7, "determinism across runs and thread counts", criterion_determinism},
        {8, "two-circles smoke test", criterion_two_circles},
    };

    bool all_ok = true;
    for (const auto& criterion : criteria) {
        Check check;
        try {
            criterion.run(check);
        } catch (const std::exception& e) {
            check.fail(std::string("exception: ") + e.what());
        }
        all_ok = all_ok && check.ok;
        std::cout << (check.ok ? "[PASS] " : "[FAIL] ") << criterion.id << ". " << criterion.name
                  << (check.detail.empty() ? "" : ": " + check.detail) << std::endl;
    }
    return all_ok ? 0 : 1;
}
