#include "support/oracles.hpp"
#include "wnet/error.hpp"
#include "wnet/pipeline.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <random>
#include <sstream>

using namespace wnet;
namespace fs = std::filesystem;

namespace {

const fs::path data_dir = WNET_TEST_DATA;

struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("wnet_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file())
            out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    return out;
}

PipelineConfig panel_config(const fs::path& out) {
    PipelineConfig c;
    c.flows_path = (data_dir / "panel_flows.csv").string();
    c.gdp_path = (data_dir / "panel_gdp.csv").string();
    c.analyses = all_analyses();
    c.write_networks = true;
    c.compare = true;
    c.out_dir = out;
    return c;
}

// y with sample correlation exactly r against x (up to rounding).
std::vector<double> correlated(const std::vector<double>& x, const std::vector<double>& noise, double r) {
    const auto n = x.size();
    auto center = [&](std::vector<double> v) {
        double m = 0;
        for (double a : v)
            m += a;
        m /= static_cast<double>(n);
        for (auto& a : v)
            a -= m;
        return v;
    };
    const auto cx = center(x);
    auto cz = center(noise);
    double xx = 0, xz = 0;
    for (std::size_t i = 0; i < n; ++i) {
        xx += cx[i] * cx[i];
        xz += cx[i] * cz[i];
    }
    for (std::size_t i = 0; i < n; ++i)
        cz[i] -= xz / xx * cx[i];
    double zz = 0;
    for (double a : cz)
        zz += a * a;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = r * cx[i] / std::sqrt(xx) + std::sqrt(1 - r * r) * cz[i] / std::sqrt(zz);
    return y;
}

} // namespace

TEST_CASE("parse_years and parse_analyses") {
    CHECK(parse_years("1981:1984") == std::vector<int>{1981, 1982, 1983, 1984});
    CHECK(parse_years("2000,1990,2000") == std::vector<int>{1990, 2000});
    CHECK(parse_years("").empty());
    CHECK_THROWS_AS(parse_years("2000:1990"), ValidationError);
    CHECK_THROWS_AS(parse_years("19x0"), ValidationError);
    CHECK(parse_analyses("stats,moments") == std::set<Analysis>{Analysis::Stats, Analysis::Moments});
    CHECK(parse_analyses("all") == all_analyses());
    CHECK_THROWS_AS(parse_analyses("stats,plots"), ValidationError);
}

TEST_CASE("config validation happens before any I/O") {
    PipelineConfig c;
    c.flows_path = "/nonexistent/flows.csv";
    c.gdp_path = "/nonexistent/gdp.csv";
    c.analyses = {Analysis::Stats};
    c.years = std::vector<int>{};
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("year selection is empty"), ValidationError);
    CHECK_THROWS_AS(compute_bundle(c), ValidationError);

    c.years.reset();
    c.analyses.clear();
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.analyses = {Analysis::Stats};
    c.gdp_path.reset();
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("needs a gdp file"), ValidationError);
    c.scheme.variant = WeightVariant::Raw;
    CHECK_NOTHROW(c.validate());
    c.ci_level = 1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.ci_level = 0.9;
    c.tail_fraction = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.tail_fraction = 0.05;
    c.jobs = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.jobs = 2;
    c.bandwidth = -1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("toy fixture: three countries, every analysis") {
    TempDir tmp;
    PipelineConfig c;
    c.flows_path = (data_dir / "toy_flows.csv").string();
    c.gdp_path = (data_dir / "toy_gdp.csv").string();
    c.analyses = all_analyses();
    c.write_networks = true;
    c.compare = true;
    c.out_dir = tmp.path / "bundle";

    const auto bundle = run_pipeline(c);
    REQUIRE(bundle.years == std::vector<int>{2000});
    const auto& t = bundle.results[0].table;
    // The toy network is a complete triangle.
    CHECK(t.nd == std::vector<int>{2, 2, 2});
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(*t.bcc[i] == 1.0);

    const auto files = tree(c.out_dir);
    CHECK(files.contains("manifest.json"));
    CHECK(files.contains("stats/2000.csv"));
    CHECK(files.contains("moments.csv"));
    CHECK(files.contains("fits.csv"));
    CHECK(files.contains("networks/2000.txt"));
    CHECK(files.contains("symmetry.csv"));
    CHECK(files.contains("log.csv"));
    for (const auto p : kAllPairs)
        CHECK(files.contains("correlations/" + to_string(p) + ".csv"));
    // Three nodes are too few for densities, tail fits or any correlation; all logged.
    CHECK(files.at("log.csv").find("density ND,skipped") != std::string::npos);
    CHECK(files.at("log.csv").find("tailfit NS,skipped") != std::string::npos);
    CHECK(files.at("log.csv").find("comparison,skipped") != std::string::npos);
}

TEST_CASE("synthetic panel bundle contents") {
    TempDir tmp;
    auto c = panel_config(tmp.path / "bundle");
    c.jobs = 3;
    const auto bundle = run_pipeline(c);
    CHECK(bundle.years == std::vector<int>{1998, 1999, 2000});
    for (const auto p : kAllPairs)
        CHECK(bundle.correlations.at(to_string(p)).size() == 3);
    REQUIRE(bundle.comparison);
    CHECK(bundle.comparison->rows.size() == 2);

    const auto files = tree(c.out_dir);
    for (int y : {1998, 1999, 2000}) {
        CHECK(files.contains("stats/" + std::to_string(y) + ".csv"));
        CHECK(files.contains("density/nd_" + std::to_string(y) + ".csv"));
        CHECK(files.contains("density/ns_" + std::to_string(y) + ".csv"));
        CHECK(files.contains("ranksize/ns_" + std::to_string(y) + ".csv"));
        CHECK(files.contains("networks/" + std::to_string(y) + ".txt"));
    }
    CHECK(files.contains("comparison.csv"));

    SUBCASE("manifest lists every file with its digest") {
        const auto manifest = nlohmann::json::parse(files.at("manifest.json"));
        std::set<std::string> listed;
        for (const auto& f : manifest["files"]) {
            const auto path = f["path"].get<std::string>();
            listed.insert(path);
            CHECK(f["sha256"].get<std::string>() == sha256_hex(files.at(path)));
        }
        CHECK(listed.size() + 1 == files.size());
        CHECK(manifest["normalizers"].size() == 3);
        CHECK(manifest["config"]["scheme"] == "exporter-gdp");
    }

    SUBCASE("network dumps reload as the normalized matrices") {
        std::ifstream in(c.out_dir / "networks" / "2000.txt");
        const auto dump = read_matrix_dump(in);
        CHECK(dump.year == 2000);
        CHECK(dump.normalizer == bundle.results[2].normalizer);
        CHECK(dump.values == *bundle.results[2].weights);
    }

    SUBCASE("report reads the correlation series back") {
        const auto loaded = load_bundle_correlations(c.out_dir);
        const auto table = compare_views(loaded);
        std::ostringstream a, b;
        write_comparison(a, table);
        write_comparison(b, *bundle.comparison);
        CHECK(a.str() == b.str());
        CHECK(a.str() == files.at("comparison.csv"));
    }
}

TEST_CASE("bundles do not depend on the number of jobs") {
    TempDir tmp;
    auto c = panel_config(tmp.path / "one");
    c.jobs = 1;
    run_pipeline(c);
    c.out_dir = tmp.path / "four";
    c.jobs = 4;
    run_pipeline(c);
    CHECK(tree(tmp.path / "one") == tree(tmp.path / "four"));
}

TEST_CASE("a failing year leaves no partial bundle") {
    TempDir tmp;
    auto c = panel_config(tmp.path / "bundle");
    c.years = std::vector<int>{1999, 2000, 2001};
    CHECK_THROWS_WITH_AS(run_pipeline(c), doctest::Contains("2001"), DataError);
    CHECK_FALSE(fs::exists(tmp.path / "bundle"));
    CHECK(fs::is_empty(tmp.path));

    // Missing GDP for an exporter is fatal under a GDP scheme, fine under raw.
    const auto flows = tmp.path / "flows.csv";
    const auto gdp = tmp.path / "gdp.csv";
    std::ofstream(flows) << "year,exporter,importer,value\n2000,A,B,1\n2000,B,C,2\n2000,C,A,3\n";
    std::ofstream(gdp) << "year,country,gdp\n2000,A,10\n2000,C,10\n";
    c.flows_path = flows.string();
    c.gdp_path = gdp.string();
    c.years.reset();
    CHECK_THROWS_WITH_AS(run_pipeline(c), doctest::Contains("missing gdp for B in 2000"), DataError);
    CHECK_FALSE(fs::exists(tmp.path / "bundle"));
    c.scheme.variant = WeightVariant::Raw;
    CHECK_NOTHROW(run_pipeline(c));
    CHECK(slurp(tmp.path / "bundle" / "log.csv").find("2000,B,warning") != std::string::npos);
}

TEST_CASE("write_bundle refuses to clobber an unrelated directory") {
    TempDir tmp;
    std::ofstream(tmp.path / "precious.txt") << "keep me";
    auto c = panel_config(tmp.path);
    CHECK_THROWS_AS(run_pipeline(c), ValidationError);
    CHECK(fs::exists(tmp.path / "precious.txt"));
}

TEST_CASE("correlation labels") {
    CHECK(correlation_label(-0.95) == "strong negative");
    CHECK(correlation_label(-0.7) == "strong negative");
    CHECK(correlation_label(-0.4) == "moderate negative");
    CHECK(correlation_label(0.3) == "moderate positive");
    CHECK(correlation_label(0.1) == "weak positive");
    CHECK(correlation_label(-0.5, 0.4, 0.2) == "strong negative");
}

TEST_CASE("compare_views on a constructed correlation fixture") {
    std::mt19937_64 rng(301);
    std::normal_distribution<double> normal;
    ReportBundle bundle;
    const std::map<CorrelationPair, double> target{{CorrelationPair::ND_ANND, -0.9},
                                                   {CorrelationPair::BCC_ND, -0.96},
                                                   {CorrelationPair::NS_ANNS, -0.3},
                                                   {CorrelationPair::WCC_NS, 0.5}};
    for (const auto& [pair, r] : target) {
        for (int year = 1981; year <= 1985; ++year) {
            std::vector<double> x(159), noise(159);
            for (auto& v : x)
                v = normal(rng);
            for (auto& v : noise)
                v = normal(rng);
            const auto y = correlated(x, noise, r);
            REQUIRE(oracle::pearson(x, y) == doctest::Approx(r).epsilon(1e-12));
            auto pt = pearson_with_ci(x, y);
            pt.year = year;
            pt.pair = to_string(pair);
            bundle.correlations[to_string(pair)].push_back(pt);
        }
    }
    const auto table = compare_views(bundle);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].view == "BNA");
    CHECK(table.rows[0].assortativity_r == doctest::Approx(-0.9).epsilon(1e-12));
    CHECK(table.rows[0].assortativity_label == "strong negative");
    CHECK(table.rows[0].clustering_label == "strong negative");
    CHECK(table.rows[1].view == "WNA");
    CHECK(table.rows[1].assortativity_r == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(table.rows[1].assortativity_label == "moderate negative");
    CHECK(table.rows[1].clustering_label == "moderate positive");

    bundle.correlations.erase("WCC-NS");
    CHECK_THROWS_WITH_AS(compare_views(bundle), doctest::Contains("WCC-NS"), DataError);
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
