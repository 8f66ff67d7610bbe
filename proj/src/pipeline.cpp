#include "wnet/pipeline.hpp"

#include "text.hpp"
#include "wnet/error.hpp"

#include <json.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#ifndef WNET_VERSION
#define WNET_VERSION "0.0.0"
#endif

namespace wnet {

namespace fs = std::filesystem;

std::string version() { return WNET_VERSION; }

std::string to_string(Analysis a) {
    switch (a) {
    case Analysis::Stats:
        return "stats";
    case Analysis::Moments:
        return "moments";
    case Analysis::Correlations:
        return "correlations";
    case Analysis::Density:
        return "density";
    case Analysis::RankSize:
        return "ranksize";
    case Analysis::TailFit:
        return "tailfit";
    case Analysis::Symmetry:
        return "symmetry";
    }
    return "?";
}

std::set<Analysis> all_analyses() {
    return {Analysis::Stats,   Analysis::Moments,  Analysis::Correlations, Analysis::Density,
            Analysis::RankSize, Analysis::TailFit, Analysis::Symmetry};
}

std::set<Analysis> parse_analyses(std::string_view list) {
    std::set<Analysis> out;
    for (const auto name : text::split(list, ',')) {
        if (name.empty())
            continue;
        if (name == "all") {
            const auto every = all_analyses();
            out.insert(every.begin(), every.end());
            continue;
        }
        bool found = false;
        for (const auto a : all_analyses()) {
            if (to_string(a) == name) {
                out.insert(a);
                found = true;
            }
        }
        if (!found)
            throw ValidationError("unknown analysis '" + std::string(name) + "'");
    }
    return out;
}

std::vector<int> parse_years(std::string_view selection) {
    std::set<int> years;
    const auto body = text::trim(selection);
    if (const auto colon = body.find(':'); colon != std::string_view::npos) {
        const auto first = text::parse_int(body.substr(0, colon));
        const auto last = text::parse_int(body.substr(colon + 1));
        if (!first || !last)
            throw ValidationError("malformed year range '" + std::string(selection) + "'");
        if (*first > *last)
            throw ValidationError("year range '" + std::string(selection) + "' is empty");
        for (int y = *first; y <= *last; ++y)
            years.insert(y);
    } else {
        for (const auto token : text::split(body, ',')) {
            if (token.empty())
                continue;
            const auto y = text::parse_int(token);
            if (!y)
                throw ValidationError("malformed year '" + std::string(token) + "'");
            years.insert(*y);
        }
    }
    return {years.begin(), years.end()};
}

void PipelineConfig::validate() const {
    if (flows_path.empty())
        throw ValidationError("no flow file given (--flows)");
    if (scheme.needs_gdp() && !gdp_path)
        throw ValidationError("scheme " + std::string(to_string(scheme.variant)) + " needs a gdp file (--gdp)");
    if (!(scheme.threshold >= 0.0) || !std::isfinite(scheme.threshold))
        throw ValidationError("threshold must be a finite nonnegative number");
    if (years && years->empty())
        throw ValidationError("year selection is empty");
    if (analyses.empty())
        throw ValidationError("no analyses selected");
    if (!(ci_level > 0.0 && ci_level < 1.0))
        throw ValidationError("ci level must lie in (0, 1)");
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw ValidationError("tail fraction must lie in (0, 1)");
    if (bandwidth && !(*bandwidth > 0.0 && std::isfinite(*bandwidth)))
        throw ValidationError("bandwidth must be positive");
    if (jobs == 0)
        throw ValidationError("jobs must be at least 1");
    if (!(moderate_threshold >= 0.0 && moderate_threshold <= strong_threshold && strong_threshold <= 1.0))
        throw ValidationError("label thresholds must satisfy 0 <= moderate <= strong <= 1");
}

namespace {

bool wants(const PipelineConfig& c, Analysis a) { return c.analyses.contains(a); }

YearResult process_year(const PanelDataset& panel, int year, const PipelineConfig& config) {
    YearResult r;
    r.year = year;

    const auto directed = build_directed(panel, year, config.scheme);
    const auto undirected = symmetrize(directed);
    r.normalizer = undirected.normalizer();
    r.directed_links = directed.link_count();
    r.undirected_links = undirected.link_count();
    if (wants(config, Analysis::Symmetry))
        r.symmetry = symmetry_index(directed);
    if (config.write_networks)
        r.weights = undirected.weights();

    r.table = node_stats(undirected);
    for (const auto s : kAllStatistics) {
        const auto col = r.table.column(s);
        const auto undefined = static_cast<std::size_t>(std::count(col.begin(), col.end(), std::nullopt));
        if (undefined > 0)
            r.log.push_back({year, to_string(s), "undefined", undefined, ""});
    }

    if (wants(config, Analysis::Density)) {
        KdeOptions opts;
        opts.bandwidth = config.bandwidth;
        for (const auto s : {Statistic::ND, Statistic::NS}) {
            const auto values = defined_values(r.table.column(s));
            try {
                r.densities.emplace(to_string(s), kde(values, opts));
            } catch (const DegenerateError& e) {
                r.log.push_back({year, "density " + to_string(s), "skipped", 0, e.what()});
            }
        }
    }

    const auto ns = r.table.column(Statistic::NS);
    if (wants(config, Analysis::RankSize)) {
        try {
            r.rank_size = rank_size(ns);
            if (r.rank_size->dropped > 0)
                r.log.push_back({year, "ranksize NS", "dropped", r.rank_size->dropped, "nonpositive or undefined"});
        } catch (const DegenerateError& e) {
            r.log.push_back({year, "ranksize NS", "skipped", 0, e.what()});
        }
    }
    if (wants(config, Analysis::TailFit)) {
        try {
            r.tail_fit = fit_tail(ns, config.tail_fraction);
            if (r.tail_fit->dropped > 0)
                r.log.push_back({year, "tailfit NS", "dropped", r.tail_fit->dropped, "nonpositive or undefined"});
        } catch (const DegenerateError& e) {
            r.log.push_back({year, "tailfit NS", "skipped", 0, e.what()});
        }
    }
    return r;
}

// Years run on up to `jobs` threads; results keep year order. The error of the
// earliest failing year is rethrown.
std::vector<YearResult> process_years(const PanelDataset& panel, const std::vector<int>& years,
                                      const PipelineConfig& config) {
    std::vector<YearResult> results(years.size());
    std::vector<std::exception_ptr> errors(years.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < years.size(); i = next++) {
            try {
                spdlog::debug("processing {}", years[i]);
                results[i] = process_year(panel, years[i], config);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const auto threads = std::min<std::size_t>(config.jobs, years.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }

    for (std::size_t i = 0; i < years.size(); ++i) {
        if (!errors[i])
            continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const ValidationError&) {
            throw;
        } catch (const DataError& e) {
            throw DataError("year " + std::to_string(years[i]) + ": " + e.what());
        }
    }
    return results;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

} // namespace

ReportBundle compute_bundle(const PipelineConfig& config) {
    config.validate();
    const auto panel = load_panel(config.flows_path, config.gdp_path);

    ReportBundle bundle;
    bundle.config = config;
    bundle.years = config.years ? *config.years : panel.years();
    for (const int y : bundle.years)
        if (!panel.has_year(y))
            throw DataError("year " + std::to_string(y) + " is not in the panel");

    for (const auto& w : panel.warnings())
        if (std::binary_search(bundle.years.begin(), bundle.years.end(), w.year))
            bundle.log.push_back({w.year, w.country, "warning", 0, w.message});

    spdlog::info("processing {} year(s) over {} countries", bundle.years.size(), panel.registry().size());
    bundle.results = process_years(panel, bundle.years, config);
    for (const auto& r : bundle.results)
        bundle.log.insert(bundle.log.end(), r.log.begin(), r.log.end());

    if (wants(config, Analysis::Moments)) {
        for (const auto s : kAllStatistics) {
            for (const auto& r : bundle.results) {
                const auto col = r.table.column(s);
                try {
                    bundle.moments.push_back(moments(col, to_string(s), r.year));
                } catch (const DegenerateError& e) {
                    bundle.log.push_back({r.year, "moments " + to_string(s), "skipped", 0, e.what()});
                }
            }
        }
    }

    if (wants(config, Analysis::Correlations)) {
        for (const auto pair : kAllPairs) {
            auto& series = bundle.correlations[to_string(pair)];
            for (const auto& r : bundle.results) {
                try {
                    series.push_back(correlation_point(r.table, pair, config.ci_level));
                } catch (const DegenerateError& e) {
                    bundle.log.push_back({r.year, to_string(pair), "skipped", 0, e.what()});
                }
            }
        }
        if (config.compare) {
            try {
                bundle.comparison = compare_views(bundle, config.strong_threshold, config.moderate_threshold);
            } catch (const DataError& e) {
                bundle.log.push_back({0, "comparison", "skipped", 0, e.what()});
            }
        }
    }
    return bundle;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

void write_correlation_series(std::ostream& out, const std::vector<CorrelationPoint>& series) {
    out << "year,pair,n,r,ci_low,ci_high\n";
    for (const auto& p : series)
        out << p.year << ',' << p.pair << ',' << p.n << ',' << text::format_double(p.r) << ','
            << text::format_double(p.ci_low) << ',' << text::format_double(p.ci_high) << '\n';
}

void write_comparison(std::ostream& out, const ComparisonTable& table) {
    out << "view,assortativity_pair,assortativity_r,assortativity_label,clustering_pair,clustering_r,"
           "clustering_label\n";
    for (const auto& row : table.rows)
        out << row.view << ',' << row.assortativity_pair << ',' << text::format_double(row.assortativity_r) << ','
            << row.assortativity_label << ',' << row.clustering_pair << ',' << text::format_double(row.clustering_r)
            << ',' << row.clustering_label << '\n';
}

namespace {

// Renders every bundle file (except the manifest) into memory, keyed by relative path.
std::map<std::string, std::string> render_files(const ReportBundle& b) {
    std::map<std::string, std::string> files;
    const auto& cfg = b.config;

    if (cfg.write_networks) {
        for (const auto& r : b.results) {
            if (!r.weights)
                continue;
            std::ostringstream out;
            write_matrix_dump(out, {r.year, std::string(to_string(cfg.scheme.variant)), r.normalizer, *r.weights});
            files["networks/" + std::to_string(r.year) + ".txt"] = out.str();
        }
        std::ostringstream codes;
        codes << "index,country\n";
        if (!b.results.empty())
            for (std::size_t i = 0; i < b.results.front().table.registry.size(); ++i)
                codes << i << ',' << b.results.front().table.registry.code(i) << '\n';
        files["networks/countries.csv"] = codes.str();
    }

    if (wants(cfg, Analysis::Symmetry)) {
        std::ostringstream out;
        out << "year,symmetry_index,directed_links,undirected_links,normalizer\n";
        for (const auto& r : b.results)
            out << r.year << ',' << text::format_optional(r.symmetry) << ',' << r.directed_links << ','
                << r.undirected_links << ',' << text::format_double(r.normalizer) << '\n';
        files["symmetry.csv"] = out.str();
    }

    if (wants(cfg, Analysis::Stats)) {
        for (const auto& r : b.results) {
            std::ostringstream out;
            write_node_stats(out, r.table);
            files["stats/" + std::to_string(r.year) + ".csv"] = out.str();
        }
    }

    if (wants(cfg, Analysis::Moments)) {
        std::ostringstream out;
        out << "statistic,year,count,mean,std,skewness,kurtosis\n";
        for (const auto& m : b.moments)
            out << m.statistic << ',' << m.year << ',' << m.count << ',' << text::format_double(m.mean) << ','
                << text::format_double(m.stddev) << ',' << text::format_optional(m.skewness) << ','
                << text::format_optional(m.kurtosis) << '\n';
        files["moments.csv"] = out.str();
    }

    if (wants(cfg, Analysis::Correlations)) {
        for (const auto& [pair, series] : b.correlations) {
            std::ostringstream out;
            write_correlation_series(out, series);
            files["correlations/" + pair + ".csv"] = out.str();
        }
        if (b.comparison) {
            std::ostringstream out;
            write_comparison(out, *b.comparison);
            files["comparison.csv"] = out.str();
        }
    }

    if (wants(cfg, Analysis::Density)) {
        for (const auto& r : b.results) {
            for (const auto& [stat, est] : r.densities) {
                std::ostringstream out;
                out << "x,density\n";
                for (std::size_t i = 0; i < est.grid.size(); ++i)
                    out << text::format_double(est.grid[i]) << ',' << text::format_double(est.density[i]) << '\n';
                std::string name = stat;
                std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
                files["density/" + name + "_" + std::to_string(r.year) + ".csv"] = out.str();
            }
        }
        std::ostringstream out;
        out << "year,statistic,n,bandwidth,integral\n";
        for (const auto& r : b.results)
            for (const auto& [stat, est] : r.densities)
                out << r.year << ',' << stat << ',' << est.sample_size << ',' << text::format_double(est.bandwidth)
                    << ',' << text::format_double(est.integral()) << '\n';
        files["density/bandwidths.csv"] = out.str();
    }

    if (wants(cfg, Analysis::RankSize)) {
        for (const auto& r : b.results) {
            if (!r.rank_size)
                continue;
            std::ostringstream out;
            out << "rank,size\n";
            for (std::size_t i = 0; i < r.rank_size->sizes.size(); ++i)
                out << r.rank_size->ranks[i] << ',' << text::format_double(r.rank_size->sizes[i]) << '\n';
            files["ranksize/ns_" + std::to_string(r.year) + ".csv"] = out.str();
        }
    }

    if (wants(cfg, Analysis::TailFit)) {
        std::ostringstream out;
        out << "year,statistic,n,dropped,q,tail_count,mu,sigma,alpha,x_min\n";
        for (const auto& r : b.results) {
            if (!r.tail_fit)
                continue;
            const auto& f = *r.tail_fit;
            out << r.year << ",NS," << f.n << ',' << f.dropped << ',' << text::format_double(f.q) << ','
                << f.tail_count << ',' << text::format_double(f.mu) << ',' << text::format_double(f.sigma) << ','
                << text::format_double(f.alpha) << ',' << text::format_double(f.x_min) << '\n';
        }
        files["fits.csv"] = out.str();
    }

    std::ostringstream log;
    log << "year,subject,item,count,note\n";
    for (const auto& e : b.log)
        log << e.year << ',' << csv_field(e.subject) << ',' << e.item << ',' << e.count << ',' << csv_field(e.note)
            << '\n';
    files["log.csv"] = log.str();
    return files;
}

std::string render_manifest(const ReportBundle& b) {
    using nlohmann::ordered_json;
    const auto& cfg = b.config;

    ordered_json config;
    config["flows"] = cfg.flows_path;
    config["gdp"] = cfg.gdp_path ? ordered_json(*cfg.gdp_path) : ordered_json(nullptr);
    config["scheme"] = std::string(to_string(cfg.scheme.variant));
    config["threshold"] = cfg.scheme.threshold;
    config["years"] = b.years;
    auto analyses = ordered_json::array();
    for (const auto a : cfg.analyses)
        analyses.push_back(to_string(a));
    config["analyses"] = analyses;
    config["ci_level"] = cfg.ci_level;
    config["tail_fraction"] = cfg.tail_fraction;
    config["bandwidth"] = cfg.bandwidth ? ordered_json(*cfg.bandwidth) : ordered_json(nullptr);
    config["networks"] = cfg.write_networks;
    config["compare"] = cfg.compare;
    config["strong_threshold"] = cfg.strong_threshold;
    config["moderate_threshold"] = cfg.moderate_threshold;

    ordered_json conventions;
    conventions["normalization"] = "per-year maximum of the symmetrized weights";
    conventions["moments"] = "population; skewness and kurtosis are the 3rd and 4th standardized moments";
    conventions["undefined"] = "ANND/ANNS undefined at degree 0, BCC/WCC at degree <= 1; excluded from moments "
                               "and correlations";
    conventions["confidence_interval"] = "two-sided Fisher z";
    conventions["kernel"] = "gaussian; Silverman bandwidth unless overridden";
    conventions["tail"] = "Hill estimator on the top fraction; log-normal MLE on all positive values";

    ordered_json normalizers;
    for (const auto& r : b.results)
        normalizers[std::to_string(r.year)] = r.normalizer;

    auto files = ordered_json::array();
    for (const auto& [path, digest] : b.files)
        files.push_back({{"path", path}, {"sha256", digest}});

    ordered_json m;
    m["software"] = {{"name", "wnet"}, {"version", version()}};
    m["config"] = config;
    m["conventions"] = conventions;
    m["normalizers"] = normalizers;
    m["files"] = files;
    return m.dump(2) + "\n";
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
}

} // namespace

void write_bundle(ReportBundle& bundle, const fs::path& dir) {
    if (dir.empty())
        throw ValidationError("no output directory given (--out)");
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir))
            throw ValidationError(dir.string() + " exists and is not a directory");
        if (!fs::is_empty(dir) && !fs::exists(dir / "manifest.json"))
            throw ValidationError(dir.string() + " is not empty and does not hold a previous bundle");
    }

    const auto files = render_files(bundle);
    bundle.files.clear();
    for (const auto& [path, content] : files)
        bundle.files[path] = sha256_hex(content);

    const fs::path target = fs::absolute(dir).lexically_normal();
    const fs::path staging = target.parent_path() / ("." + target.filename().string() + ".staging");
    try {
        fs::remove_all(staging);
        for (const auto& [path, content] : files)
            write_file(staging / path, content);
        write_file(staging / "manifest.json", render_manifest(bundle));
        fs::remove_all(target);
        fs::rename(staging, target);
    } catch (...) {
        std::error_code ignored;
        fs::remove_all(staging, ignored);
        throw;
    }
    spdlog::info("wrote {} files to {}", files.size() + 1, target.string());
}

ReportBundle run_pipeline(const PipelineConfig& config) {
    config.validate();
    auto bundle = compute_bundle(config);
    write_bundle(bundle, config.out_dir);
    return bundle;
}

std::string correlation_label(double r, double strong, double moderate) {
    const double magnitude = std::abs(r);
    const char* strength = magnitude >= strong ? "strong" : magnitude >= moderate ? "moderate" : "weak";
    return std::string(strength) + (r < 0.0 ? " negative" : " positive");
}

ComparisonTable compare_views(const ReportBundle& bundle, double strong, double moderate) {
    auto mean_r = [&](CorrelationPair pair) {
        const auto label = to_string(pair);
        const auto it = bundle.correlations.find(label);
        if (it == bundle.correlations.end() || it->second.empty())
            throw DataError("bundle has no " + label + " correlation series");
        double sum = 0.0;
        for (const auto& p : it->second)
            sum += p.r;
        return sum / static_cast<double>(it->second.size());
    };

    auto row = [&](std::string view, CorrelationPair assort, CorrelationPair clust) {
        ComparisonRow r;
        r.view = std::move(view);
        r.assortativity_pair = to_string(assort);
        r.assortativity_r = mean_r(assort);
        r.assortativity_label = correlation_label(r.assortativity_r, strong, moderate);
        r.clustering_pair = to_string(clust);
        r.clustering_r = mean_r(clust);
        r.clustering_label = correlation_label(r.clustering_r, strong, moderate);
        return r;
    };

    ComparisonTable table;
    table.rows.push_back(row("BNA", CorrelationPair::ND_ANND, CorrelationPair::BCC_ND));
    table.rows.push_back(row("WNA", CorrelationPair::NS_ANNS, CorrelationPair::WCC_NS));
    return table;
}

ReportBundle load_bundle_correlations(const fs::path& dir) {
    if (!fs::is_regular_file(dir / "manifest.json"))
        throw DataError("no bundle at " + dir.string() + " (manifest.json missing)");
    ReportBundle bundle;
    for (const auto pair : kAllPairs) {
        const auto label = to_string(pair);
        const auto path = dir / "correlations" / (label + ".csv");
        std::ifstream in(path);
        if (!in)
            continue;
        std::vector<CorrelationPoint> series;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            if (++lineno == 1 || text::trim(line).empty())
                continue;
            const auto f = text::split(line, ',');
            CorrelationPoint p;
            const auto year = f.size() == 6 ? text::parse_int(f[0]) : std::nullopt;
            const auto n = f.size() == 6 ? text::parse_int(f[2]) : std::nullopt;
            const auto r = f.size() == 6 ? text::parse_double(f[3]) : std::nullopt;
            const auto lo = f.size() == 6 ? text::parse_double(f[4]) : std::nullopt;
            const auto hi = f.size() == 6 ? text::parse_double(f[5]) : std::nullopt;
            if (!year || !n || !r || !lo || !hi)
                throw DataError(path.string() + " line " + std::to_string(lineno) + ": malformed row");
            p.year = *year;
            p.pair = std::string(f[1]);
            p.n = static_cast<std::size_t>(*n);
            p.r = *r;
            p.ci_low = *lo;
            p.ci_high = *hi;
            series.push_back(std::move(p));
        }
        bundle.correlations[label] = std::move(series);
    }
    return bundle;
}

} // namespace wnet
