// wnet: weighted trade-network statistics from bilateral flow data.
//
//   wnet all --flows flows.csv --gdp gdp.csv --years 1981:2000 --out report/
//
// Exit codes: 0 success, 1 validation error, 2 data error, 3 internal error.

#include "wnet/error.hpp"
#include "wnet/pipeline.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kData = 2, kInternal = 3 };

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("wnet");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("WNET_LOG"))
        spdlog::set_level(spdlog::level::from_str(env));
}

struct Options {
    std::string flows;
    std::string gdp;
    std::string scheme = "exporter-gdp";
    double threshold = 0.0;
    std::string years;
    std::string analyses;
    double ci_level = 0.90;
    double tail_fraction = 0.05;
    double bandwidth = 0.0;
    unsigned jobs = 1;
    std::string out;
    double strong = 0.7;
    double moderate = 0.3;
};

wnet::PipelineConfig make_config(const Options& o, const CLI::App& app, std::set<wnet::Analysis> defaults) {
    wnet::PipelineConfig c;
    c.flows_path = o.flows;
    if (app.count("--gdp") > 0)
        c.gdp_path = o.gdp;
    c.scheme.variant = wnet::parse_weight_variant(o.scheme);
    c.scheme.threshold = o.threshold;
    if (app.count("--years") > 0)
        c.years = wnet::parse_years(o.years);
    c.analyses = app.count("--analyses") > 0 ? wnet::parse_analyses(o.analyses) : std::move(defaults);
    c.ci_level = o.ci_level;
    c.tail_fraction = o.tail_fraction;
    if (app.count("--bandwidth") > 0)
        c.bandwidth = o.bandwidth;
    c.jobs = o.jobs;
    c.out_dir = o.out;
    c.strong_threshold = o.strong;
    c.moderate_threshold = o.moderate;
    return c;
}

int run_report(const Options& o) {
    if (o.out.empty())
        throw wnet::ValidationError("report needs the bundle directory (--out)");
    const auto bundle = wnet::load_bundle_correlations(o.out);
    const auto table = wnet::compare_views(bundle, o.strong, o.moderate);
    wnet::write_comparison(std::cout, table);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Binary and weighted statistics for trade-style networks"};
    app.set_version_flag("--version", wnet::version());
    app.set_config("--config", "", "Key/value config file; command-line flags take precedence");
    app.require_subcommand(1);

    Options o;
    app.add_option("--flows", o.flows, "Flow CSV (year,exporter,importer,value)");
    app.add_option("--gdp", o.gdp, "GDP CSV (year,country,gdp); optional under --scheme raw");
    app.add_option("--scheme", o.scheme, "Link weights")
        ->check(CLI::IsMember({"exporter-gdp", "importer-gdp", "raw"}))
        ->capture_default_str();
    app.add_option("--threshold", o.threshold, "Links need a flow strictly above this")->capture_default_str();
    app.add_option("--years", o.years, "Inclusive range A:B or list y1,y2 (default: every year)");
    app.add_option("--analyses", o.analyses,
                   "Comma list of stats,moments,correlations,density,ranksize,tailfit,symmetry");
    app.add_option("--ci-level", o.ci_level, "Two-sided Fisher-z confidence level")->capture_default_str();
    app.add_option("--tail-fraction", o.tail_fraction, "Top fraction used by the Hill estimator")
        ->capture_default_str();
    app.add_option("--bandwidth", o.bandwidth, "Kernel bandwidth override (default: Silverman)");
    app.add_option("--jobs", o.jobs, "Years processed concurrently")->capture_default_str();
    app.add_option("--out", o.out, "Output (or, for report, input) bundle directory");
    app.add_option("--strong", o.strong, "|r| at or above this is labelled strong")->capture_default_str();
    app.add_option("--moderate", o.moderate, "|r| at or above this is labelled moderate")->capture_default_str();

    using wnet::Analysis;
    auto* build = app.add_subcommand("build", "Build symmetrized networks; dump matrices and symmetry indices");
    auto* stats = app.add_subcommand("stats", "Per-node statistics tables and their moments");
    auto* analyze = app.add_subcommand("analyze", "Correlations, densities, rank-size curves and tail fits");
    auto* report = app.add_subcommand("report", "Print the BNA/WNA comparison of an existing bundle");
    auto* all = app.add_subcommand("all", "Everything above in one bundle");
    for (auto* sub : {build, stats, analyze, report, all})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (report->parsed())
            return run_report(o);

        wnet::PipelineConfig config;
        if (build->parsed()) {
            config = make_config(o, app, {Analysis::Symmetry});
            config.write_networks = true;
        } else if (stats->parsed()) {
            config = make_config(o, app, {Analysis::Stats, Analysis::Moments});
        } else if (analyze->parsed()) {
            config = make_config(o, app, {Analysis::Correlations, Analysis::Density, Analysis::RankSize,
                                          Analysis::TailFit});
        } else {
            config = make_config(o, app, wnet::all_analyses());
            config.write_networks = true;
            config.compare = true;
        }
        if (config.out_dir.empty())
            throw wnet::ValidationError("no output directory given (--out)");
        const auto bundle = wnet::run_pipeline(config);
        std::cout << "wrote " << bundle.files.size() + 1 << " files to " << config.out_dir.string() << '\n';
        return kOk;
    } catch (const wnet::ValidationError& e) {
        std::cerr << "wnet: " << e.what() << '\n';
        return kValidation;
    } catch (const wnet::DataError& e) {
        std::cerr << "wnet: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "wnet: internal error: " << e.what() << '\n';
        return kInternal;
    }
}
