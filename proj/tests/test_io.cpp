#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "dsi/io.hpp"

using namespace dsi;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / ("dsi_io_test_" + std::to_string(std::rand()));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("scheme JSON round-trips decimals exactly") {
    SamplingScheme scheme;
    scheme.lambda = 1.66;
    scheme.boundaries = {1.0, 1.1234567890123457, 1.3, 1.66};
    scheme.n_scales = 4;
    const auto obj = to_json(scheme);
    const auto back = scheme_from_json(nlohmann::json::parse(obj.dump()));
    CHECK(back.lambda == scheme.lambda);
    CHECK(back.boundaries == scheme.boundaries);
    CHECK(back.n_scales == scheme.n_scales);
}

TEST_CASE("model JSON round-trip and strict keys") {
    SubsidiaryModel model;
    model.scheme.lambda = 2.0;
    model.scheme.boundaries = {1.0, 1.5, 2.0};
    model.scheme.n_scales = 3;
    model.hurst = 0.7;
    model.beta = 0.25;
    model.gram.resize(2, 2);
    model.gram << 1.0, 0.3, 0.3, 2.0;
    model.mean.resize(2);
    model.mean << 0.5, -0.5;

    auto obj = to_json(model);
    const auto back = model_from_json(obj);
    CHECK(back.hurst == model.hurst);
    CHECK(back.beta == model.beta);
    CHECK((back.gram - model.gram).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.mean - model.mean).cwiseAbs().maxCoeff() == 0.0);

    obj["typo_key"] = 1;
    CHECK_THROWS_AS(model_from_json(obj), ConfigError);
}

TEST_CASE("validation errors report every violation") {
    nlohmann::json obj{{"lambda", 0.5}, {"boundaries", {2.0, 1.0}}, {"n_scales", -1},
                       {"bogus", true}};
    try {
        scheme_from_json(obj);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations().size() >= 2);
        bool unknown = false;
        for (const auto& v : e.violations())
            if (v.find("bogus") != std::string::npos) unknown = true;
        CHECK(unknown);
    }
}

TEST_CASE("sampled path CSV round-trip") {
    TempDir tmp;
    SampledPath path;
    path.times = {1.0, 1.0000000001, 2.5, 3.7777777777777777};
    path.values = {0.1, -2.3e-15, 1e300, 42.0};
    const auto file = tmp.dir / "path.csv";
    write_path_csv(path, file);
    const auto back = read_path_csv(file);
    CHECK(back.times == path.times);
    CHECK(back.values == path.values);
}

TEST_CASE("binary path block round-trip is bit exact") {
    TempDir tmp;
    Eigen::MatrixXd paths(3, 4);
    paths << 1, 2, 3, 4, 5.5, -6.25, 7e-30, 8, 9, 10, 11, 1.0 / 3.0;
    const auto file = tmp.dir / "paths.bin";
    write_paths_binary(paths, file);
    const auto back = read_paths_binary(file);
    CHECK((back - paths).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ingest_csv filtering and errors") {
    TempDir tmp;
    const auto file = tmp.dir / "index.csv";
    {
        std::ofstream os(file);
        os << "Date,Open,Close\n";
        os << "2000-01-03,10,1455.22\n";
        os << "2000-01-04,10,1399.42\n";
        os << "2000-01-05,10,1402.11\n";
        os << "2001-01-05,10,1300.00\n";
    }
    const auto all = ingest_csv(file, "Date", "Close");
    CHECK(all.dates.size() == 4);
    CHECK(all.closes[1] == doctest::Approx(1399.42));

    const auto filtered = ingest_csv(file, "Date", "Close", "2000-01-04", "2000-12-31");
    CHECK(filtered.dates.size() == 2);
    CHECK(filtered.dates.front() == "2000-01-04");

    CHECK_THROWS_AS(ingest_csv(file, "Date", "Close", "2010-01-01", "2011-01-01"),
                    EmptySelectionError);
    CHECK_THROWS_AS(ingest_csv(file, "Date", "AdjClose"), ParseError);

    const auto path = all.to_path();
    CHECK(path.times == std::vector<double>{0, 1, 2, 3});

    {
        std::ofstream os(file, std::ios::app);
        os << "2000-06-01,10,1000\n";  // out of order
    }
    CHECK_THROWS_AS(ingest_csv(file, "Date", "Close"), NonMonotoneDatesError);

    const auto bad = tmp.dir / "bad.csv";
    {
        std::ofstream os(bad);
        os << "Date,Close\n2000-01-03,abc\n";
    }
    try {
        ingest_csv(bad, "Date", "Close");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("hurst estimate JSON has the contract keys") {
    HurstEstimate est;
    est.per_sub.resize(2);
    est.per_sub << 0.23, 0.06;
    est.per_pair.resize(3, 2);
    est.per_pair.setConstant(0.1);
    est.baseline = 0.16;
    est.lambda_used = 1.66;
    const auto obj = to_json(est);
    CHECK(obj.contains("per_sub"));
    CHECK(obj.contains("per_pair"));
    CHECK(obj.contains("baseline"));
    CHECK(obj.contains("lambda_used"));
    CHECK(obj["per_sub"][0].get<double>() == 0.23);
    const auto text = hurst_report_text(est);
    CHECK(text.find("baseline") != std::string::npos);
}
