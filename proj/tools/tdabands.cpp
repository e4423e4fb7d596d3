// Command-line front end: persistence diagrams, landscapes, silhouettes,
// bootstrap confidence bands, the subsampling pipeline and the coverage
// harness. All subcommands are deterministic given their seed; outputs are
// byte-identical for any --threads value.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdabands/band_io.hpp"
#include "tdabands/diagram.hpp"
#include "tdabands/pipeline.hpp"
#include "tdabands/version.hpp"

namespace {

using namespace tdabands;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("failed reading '" + path + "'");
    return buffer.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path + "'");
}

// Inputs listed explicitly plus the *.csv files of a directory, sorted.
std::vector<std::string> collect_inputs(const std::vector<std::string>& files,
                                        const std::string& dir) {
    std::vector<std::string> paths = files;
    if (!dir.empty()) {
        std::error_code ec;
        std::filesystem::directory_iterator it(dir, ec);
        if (ec) throw IoError("cannot list directory '" + dir + "': " + ec.message());
        std::vector<std::string> found;
        for (const auto& entry : it)
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                found.push_back(entry.path().string());
        std::sort(found.begin(), found.end());
        paths.insert(paths.end(), found.begin(), found.end());
    }
    if (paths.empty()) throw ValidationError("no input files given");
    return paths;
}

Sample load_sample(const std::vector<std::string>& paths) {
    std::vector<SummaryFunction> fns;
    fns.reserve(paths.size());
    for (const auto& path : paths) {
        try {
            fns.push_back(parse_summary_csv(read_file(path)));
        } catch (const IoError&) {
            throw;
        } catch (const std::exception& e) {
            throw ValidationError(path + ": " + e.what());
        }
    }
    return make_sample(std::move(fns));
}

// Largest finite death among the rows of the requested dimension; used when
// --t-bound is omitted.
double max_death_for_dim(const std::string& text, int dim) {
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    double max_death = 0.0;
    bool saw_row = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto fields = split_csv(body);
        if (!saw_row && !fields.empty() && iequals(trim(fields[0]), "dim")) continue;
        if (fields.size() != 3)
            throw ParseError("line " + std::to_string(lineno) + ": expected 3 fields");
        saw_row = true;
        if (parse_long(fields[0], "dim") != dim) continue;
        const double death = parse_double(fields[2], "death");
        if (std::isfinite(death)) max_death = std::max(max_death, death);
    }
    return max_death;
}

std::vector<std::pair<std::string, std::string>> csv_meta(const ordered_json& config,
                                                          std::optional<std::uint64_t> seed = {}) {
    std::vector<std::pair<std::string, std::string>> meta;
    meta.emplace_back("tool", std::string(kToolName));
    meta.emplace_back("version", std::string(kToolVersion));
    if (seed) meta.emplace_back("seed", std::to_string(*seed));
    meta.emplace_back("config", config.dump());
    return meta;
}

ordered_json json_meta(const ordered_json& config) {
    ordered_json meta;
    meta["tool"] = kToolName;
    meta["version"] = kToolVersion;
    meta["config"] = config;
    return meta;
}

struct SummaryFlags {
    std::string family = "landscape";
    int k = 1;
    std::string power = "1";

    void attach(CLI::App* cmd) {
        cmd->add_option("--summary", family, "Summary kind: landscape or silhouette")
            ->check(CLI::IsMember({"landscape", "silhouette"}))
            ->capture_default_str();
        cmd->add_option("--k", k, "Landscape order")->capture_default_str();
        cmd->add_option("--p", power, "Silhouette power (positive real or 'inf')")
            ->capture_default_str();
    }

    SummaryKind resolve() const {
        if (family == "landscape") return SummaryKind::landscape(k);
        return SummaryKind::silhouette(parse_double(power, "--p"));
    }

    void echo(ordered_json& config) const {
        config["summary"] = family;
        if (family == "landscape") config["k"] = k;
        else config["p"] = parse_double(power, "--p");
    }
};

struct BandFlags {
    double alpha = 0.05;
    int replicates = 1000;
    std::uint64_t seed = 0;
    std::string kind = "uniform";
    std::optional<double> variance_floor;
    bool clamp_zero = false;

    void attach(CLI::App* cmd, bool with_kind = true, bool with_seed = true) {
        cmd->add_option("--alpha", alpha, "Band level is 1 - alpha")->capture_default_str();
        cmd->add_option("--B", replicates, "Bootstrap replicates")->capture_default_str();
        if (with_seed) cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
        if (with_kind)
            cmd->add_option("--band", kind, "Band kind")
                ->check(CLI::IsMember({"uniform", "adaptive"}))
                ->capture_default_str();
        cmd->add_option("--variance-floor", variance_floor,
                        "Adaptive: exclude nodes with sigma_hat <= floor "
                        "(default 1e-8 * t_max / 2)");
        cmd->add_flag("--clamp-zero", clamp_zero, "Clamp the displayed lower band at 0");
    }

    BootstrapConfig resolve(std::uint64_t resolved_seed) const {
        BootstrapConfig cfg;
        cfg.alpha = alpha;
        cfg.replicates = replicates;
        cfg.seed = resolved_seed;
        cfg.kind = kind == "adaptive" ? BandKind::adaptive : BandKind::uniform;
        cfg.variance_floor = variance_floor;
        return cfg;
    }

    void echo(ordered_json& config, bool with_seed = true) const {
        config["alpha"] = alpha;
        config["B"] = replicates;
        if (with_seed) config["seed"] = seed;
        config["band"] = kind;
        if (variance_floor) config["variance_floor"] = *variance_floor;
        config["clamp_zero"] = clamp_zero;
    }
};

struct GridFlags {
    double t_min = 0.0;
    std::optional<double> t_max;
    int resolution = 1000;

    void attach(CLI::App* cmd) {
        cmd->add_option("--t-min", t_min, "Grid start")->capture_default_str();
        cmd->add_option("--t-max", t_max, "Grid end (default: t_bound)");
        cmd->add_option("--grid", resolution, "Grid resolution (number of nodes)")
            ->capture_default_str();
    }

    Grid resolve(double t_bound) const { return Grid(t_min, t_max.value_or(t_bound), resolution); }

    void echo(ordered_json& config, const Grid& grid) const {
        config["grid"] = {{"t_min", grid.t_min},
                          {"t_max", grid.t_max},
                          {"resolution", grid.resolution}};
    }
};

int run(int argc, char** argv) {
    CLI::App app{"Persistence landscapes, weighted silhouettes and "
                 "multiplier-bootstrap confidence bands"};
    app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kToolVersion));
    app.require_subcommand(1);

    int threads = default_thread_count();
    app.add_option("--threads", threads,
                   "Worker threads (output is independent of this value)")
        ->envname("TDA_BANDS_THREADS")
        ->capture_default_str();

    // ---- rips ------------------------------------------------------------
    auto* rips_cmd = app.add_subcommand("rips", "Point cloud -> persistence diagram CSV");
    std::string rips_input, rips_output = "-";
    double rips_scale = 0.0;
    int rips_dim = 1;
    std::optional<double> rips_t_bound;
    bool rips_truncate = false;
    rips_cmd->add_option("--input", rips_input, "Point cloud CSV")->required();
    rips_cmd->add_option("--max-scale", rips_scale, "Maximum filtration scale")->required();
    rips_cmd->add_option("--dim", rips_dim, "Homology dimension (0 or 1)")->capture_default_str();
    rips_cmd->add_option("--t-bound", rips_t_bound, "Diagram bound T (default: max-scale)");
    rips_cmd->add_flag("--truncate-essential", rips_truncate,
                       "Replace infinite deaths by t_bound instead of rejecting");
    rips_cmd->add_option("--output", rips_output, "Output path or '-'")->capture_default_str();

    // ---- landscape / silhouette -------------------------------------------
    struct SummaryCmd {
        CLI::App* cmd = nullptr;
        std::string input, output = "-";
        int dim = 1;
        std::optional<double> t_bound;
        bool truncate = false;
        GridFlags grid;
    };
    SummaryCmd land, silh;
    int land_k = 1;
    std::string silh_p = "1";
    land.cmd = app.add_subcommand("landscape", "Diagram CSV -> k-th landscape CSV");
    land.cmd->add_option("--k", land_k, "Landscape order")->capture_default_str();
    silh.cmd = app.add_subcommand("silhouette", "Diagram CSV -> power-weighted silhouette CSV");
    silh.cmd->add_option("--p", silh_p, "Power (positive real or 'inf')")->capture_default_str();
    for (SummaryCmd* sc : {&land, &silh}) {
        sc->cmd->add_option("--input", sc->input, "Diagram CSV")->required();
        sc->cmd->add_option("--dim", sc->dim, "Diagram dimension to read")->capture_default_str();
        sc->cmd->add_option("--t-bound", sc->t_bound,
                            "Diagram bound T (default: max death in the input)");
        sc->cmd->add_flag("--truncate-essential", sc->truncate,
                          "Replace infinite deaths by t_bound instead of rejecting");
        sc->grid.attach(sc->cmd);
        sc->cmd->add_option("--output", sc->output, "Output path or '-'")->capture_default_str();
    }

    // ---- mean --------------------------------------------------------------
    auto* mean_cmd = app.add_subcommand("mean", "Summary CSVs -> pointwise mean CSV");
    std::vector<std::string> mean_inputs;
    std::string mean_dir, mean_output = "-";
    mean_cmd->add_option("--input", mean_inputs, "Summary CSV files");
    mean_cmd->add_option("--input-dir", mean_dir, "Directory of summary CSVs");
    mean_cmd->add_option("--output", mean_output, "Output path or '-'")->capture_default_str();

    // ---- band ---------------------------------------------------------------
    auto* band_cmd = app.add_subcommand(
        "band", "Summary CSVs -> multiplier-bootstrap confidence band");
    std::vector<std::string> band_inputs;
    std::string band_dir, band_output = "-", band_format = "json";
    BandFlags band_flags;
    band_cmd->add_option("--input", band_inputs, "Summary CSV files");
    band_cmd->add_option("--input-dir", band_dir, "Directory of summary CSVs");
    band_flags.attach(band_cmd);
    band_cmd->add_option("--format", band_format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    band_cmd->add_option("--output", band_output, "Output path or '-'")->capture_default_str();

    // ---- subsample -----------------------------------------------------------
    auto* sub_cmd = app.add_subcommand(
        "subsample", "Cloud CSV -> n subsample summaries -> confidence band");
    std::string sub_input, sub_output = "-", sub_format = "json";
    int sub_m = 0, sub_n = 0, sub_dim = 1;
    std::uint64_t sub_seed = 0;
    double sub_scale = 0.0;
    std::optional<double> sub_t_bound;
    bool sub_truncate = false, sub_with_replacement = false;
    SummaryFlags sub_summary;
    GridFlags sub_grid;
    BandFlags sub_band;
    sub_cmd->add_option("--input", sub_input, "Point cloud CSV")->required();
    sub_cmd->add_option("--m", sub_m, "Subsample size")->required();
    sub_cmd->add_option("--n", sub_n, "Number of repetitions")->required();
    sub_cmd->add_option("--seed", sub_seed, "Master seed")->capture_default_str();
    sub_cmd->add_option("--max-scale", sub_scale, "Maximum filtration scale")->required();
    sub_cmd->add_option("--dim", sub_dim, "Homology dimension")->capture_default_str();
    sub_cmd->add_option("--t-bound", sub_t_bound, "Diagram bound T (default: max-scale)");
    sub_cmd->add_flag("--truncate-essential", sub_truncate,
                      "Replace infinite deaths by t_bound instead of rejecting");
    sub_cmd->add_flag("--with-replacement", sub_with_replacement,
                      "Sample subsamples with replacement");
    sub_summary.attach(sub_cmd);
    sub_grid.attach(sub_cmd);
    sub_band.attach(sub_cmd, /*with_kind=*/true, /*with_seed=*/false);
    sub_cmd->add_option("--format", sub_format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    sub_cmd->add_option("--output", sub_output, "Output path or '-'")->capture_default_str();

    // ---- coverage ---------------------------------------------------------------
    auto* cov_cmd = app.add_subcommand("coverage", "Monte Carlo coverage harness");
    std::string cov_generator, cov_output = "-", cov_n = "30", cov_bands = "both";
    int cov_R = 200;
    std::optional<int> cov_M;
    double cov_region = 0.4;
    SummaryFlags cov_summary;
    GridFlags cov_grid;
    BandFlags cov_band;
    cov_cmd->add_option("--generator", cov_generator,
                        "Generator spec, e.g. pair:dmin=1,dmax=2 or "
                        "circle:points=40,radius=1,noise=0.1,max_scale=2")
        ->required();
    cov_cmd->add_option("--n", cov_n, "Sample sizes, comma separated")->capture_default_str();
    cov_cmd->add_option("--R", cov_R, "Monte Carlo rounds")->capture_default_str();
    cov_cmd->add_option("--M", cov_M,
                        "Ground-truth draws (default 100000 for pair, 1000 for clouds)");
    cov_cmd->add_option("--bands", cov_bands, "uniform, adaptive or both")
        ->check(CLI::IsMember({"uniform", "adaptive", "both"}))
        ->capture_default_str();
    cov_cmd->add_option("--region-threshold", cov_region,
                        "Theorem region: sigma above this fraction of its peak")
        ->capture_default_str();
    cov_summary.attach(cov_cmd);
    cov_grid.attach(cov_cmd);
    cov_band.attach(cov_cmd, /*with_kind=*/false);
    cov_cmd->add_option("--output", cov_output, "Output path or '-'")->capture_default_str();

    // app-level flags like --threads may appear after the subcommand name
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints usage to the error stream
        return 1;
    }

    if (threads < 1) throw ValidationError("--threads must be >= 1");

    if (rips_cmd->parsed()) {
        const double t_bound = rips_t_bound.value_or(rips_scale);
        const auto policy = rips_truncate ? EssentialPolicy::truncate : EssentialPolicy::reject;
        const PointCloud cloud = parse_point_cloud(read_file(rips_input));
        const auto complex = build_rips(cloud, rips_scale, std::min(rips_dim + 1, 2));
        const auto diagrams = compute_persistence(complex, t_bound, policy, {rips_dim});

        ordered_json config{{"subcommand", "rips"},       {"input", rips_input},
                            {"max_scale", rips_scale},    {"dim", rips_dim},
                            {"t_bound", t_bound},         {"truncate_essential", rips_truncate}};
        std::ostringstream out;
        out << "# tdabands-diagram\n";
        for (const auto& [key, value] : csv_meta(config)) out << "# " << key << '=' << value << '\n';
        write_diagram(diagrams.at(rips_dim), out);
        write_output(rips_output, out.str());
        return 0;
    }

    for (SummaryCmd* sc : {&land, &silh}) {
        if (!sc->cmd->parsed()) continue;
        const bool is_landscape = sc == &land;
        const std::string text = read_file(sc->input);
        double t_bound = sc->t_bound.value_or(max_death_for_dim(text, sc->dim));
        if (!(t_bound > 0.0))
            throw ValidationError("cannot infer t_bound from the input; pass --t-bound");
        const auto policy = sc->truncate ? EssentialPolicy::truncate : EssentialPolicy::reject;
        const Diagram diagram = parse_diagram(text, t_bound, sc->dim, policy);
        const Grid grid = sc->grid.resolve(t_bound);
        const SummaryFunction f =
            is_landscape ? landscape_on_grid(diagram, land_k, grid)
                         : silhouette_on_grid(diagram, SilhouetteParams(
                                                           parse_double(silh_p, "--p")), grid);

        ordered_json config{{"subcommand", is_landscape ? "landscape" : "silhouette"},
                            {"input", sc->input},
                            {"dim", sc->dim},
                            {"t_bound", t_bound},
                            {"truncate_essential", sc->truncate}};
        if (is_landscape) config["k"] = land_k;
        else config["p"] = parse_double(silh_p, "--p");
        sc->grid.echo(config, grid);
        std::ostringstream out;
        write_summary_csv(f, out, csv_meta(config));
        write_output(sc->output, out.str());
        return 0;
    }

    if (mean_cmd->parsed()) {
        const auto paths = collect_inputs(mean_inputs, mean_dir);
        const Sample sample = load_sample(paths);
        const SummaryFunction mean = mean_summary(sample);
        ordered_json config{{"subcommand", "mean"}, {"inputs", paths}, {"n", sample.size()}};
        std::ostringstream out;
        write_summary_csv(mean, out, csv_meta(config));
        write_output(mean_output, out.str());
        return 0;
    }

    if (band_cmd->parsed()) {
        const auto paths = collect_inputs(band_inputs, band_dir);
        const Sample sample = load_sample(paths);
        const BootstrapConfig cfg = band_flags.resolve(band_flags.seed);
        const BootstrapResult result = confidence_band(sample, cfg, threads);

        ordered_json config{{"subcommand", "band"}, {"inputs", paths}, {"n", sample.size()}};
        band_flags.echo(config);
        std::ostringstream out;
        if (band_format == "json")
            out << band_to_json(result, sample.size(), cfg.seed, json_meta(config),
                                band_flags.clamp_zero)
                       .dump(2)
                << '\n';
        else
            write_band_csv(result, sample.size(), cfg.seed, out, csv_meta(config),
                           band_flags.clamp_zero);
        write_output(band_output, out.str());
        return 0;
    }

    if (sub_cmd->parsed()) {
        const PointCloud cloud = parse_point_cloud(read_file(sub_input));
        SubsampleConfig cfg;
        cfg.subsample_size = sub_m;
        cfg.repetitions = sub_n;
        cfg.seed = substream(sub_seed, 0); // independent of the bootstrap stream
        cfg.max_scale = sub_scale;
        cfg.dim = sub_dim;
        cfg.summary = sub_summary.resolve();
        cfg.t_bound = sub_t_bound.value_or(sub_scale);
        cfg.grid = sub_grid.resolve(cfg.t_bound);
        cfg.essential = sub_truncate ? EssentialPolicy::truncate : EssentialPolicy::reject;
        cfg.with_replacement = sub_with_replacement;
        const Sample sample = subsample_summaries(cloud, cfg, threads);

        const BootstrapConfig band_cfg = sub_band.resolve(substream(sub_seed, 1));
        const BootstrapResult result = confidence_band(sample, band_cfg, threads);

        ordered_json config{{"subcommand", "subsample"},
                            {"input", sub_input},
                            {"m", sub_m},
                            {"n", sub_n},
                            {"max_scale", sub_scale},
                            {"dim", sub_dim},
                            {"t_bound", cfg.t_bound},
                            {"truncate_essential", sub_truncate},
                            {"with_replacement", sub_with_replacement}};
        sub_summary.echo(config);
        sub_grid.echo(config, cfg.grid);
        sub_band.echo(config, /*with_seed=*/false);
        config["seed"] = sub_seed; // the one seed drives subsampling and bootstrap
        std::ostringstream out;
        if (sub_format == "json")
            out << band_to_json(result, sample.size(), sub_seed, json_meta(config),
                                sub_band.clamp_zero)
                       .dump(2)
                << '\n';
        else
            write_band_csv(result, sample.size(), sub_seed, out, csv_meta(config),
                           sub_band.clamp_zero);
        write_output(sub_output, out.str());
        return 0;
    }

    if (cov_cmd->parsed()) {
        CoverageConfig cfg;
        cfg.generator = GeneratorSpec::parse(cov_generator);
        cfg.summary = cov_summary.resolve();
        cfg.grid = cov_grid.resolve(cfg.generator.t_bound());
        cfg.n_values.clear();
        for (auto part : split_csv(cov_n))
            cfg.n_values.push_back(static_cast<int>(parse_long(part, "--n")));
        cfg.rounds = cov_R;
        cfg.mu_draws = cov_M.value_or(
            cfg.generator.kind == GeneratorSpec::Kind::single_pair ? 100000 : 1000);
        cfg.alpha = cov_band.alpha;
        cfg.replicates = cov_band.replicates;
        if (cov_bands == "uniform") cfg.kinds = {BandKind::uniform};
        else if (cov_bands == "adaptive") cfg.kinds = {BandKind::adaptive};
        else cfg.kinds = {BandKind::uniform, BandKind::adaptive};
        cfg.seed = cov_band.seed;
        cfg.region_rel_threshold = cov_region;
        cfg.variance_floor = cov_band.variance_floor;

        const CoverageReport report = coverage_experiment(cfg, threads);
        ordered_json out_json = coverage_report_to_json(report);
        out_json["meta"] = {{"tool", kToolName}, {"version", kToolVersion}};
        write_output(cov_output, out_json.dump(2) + "\n");
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
