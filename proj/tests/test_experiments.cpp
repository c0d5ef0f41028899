#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "cubeperc/experiments.hpp"

using namespace cubeperc;

namespace {

std::string run(ExperimentConfig cfg, Report* rep = nullptr) {
    std::ostringstream out;
    auto r = run_experiment(cfg, out);
    if (rep) *rep = std::move(r);
    return out.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

/// Headers listed in the ```columns block of docs/SCHEMAS.md.
std::map<std::string, std::string> documented_headers() {
    std::ifstream in(std::string(CUBEPERC_SOURCE_DIR) + "/docs/SCHEMAS.md");
    REQUIRE(in);
    std::map<std::string, std::string> out;
    std::string line;
    bool inside = false;
    while (std::getline(in, line)) {
        if (line == "```columns") {
            inside = true;
        } else if (inside && line == "```") {
            break;
        } else if (inside) {
            const auto colon = line.find(": ");
            out[line.substr(0, colon)] = line.substr(colon + 2);
        }
    }
    return out;
}

ExperimentConfig make(Command c, int d, double p) {
    ExperimentConfig cfg;
    cfg.command = c;
    cfg.d = d;
    cfg.p = p;
    cfg.format = OutputFormat::Csv;
    return cfg;
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("parallel_for visits every index once and propagates exceptions") {
    std::vector<int> hits(1000, 0);
    parallel_for(1000, 4, [&](std::uint64_t i) { hits[i]++; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::uint64_t i) { if (i == 7) throw DomainError("x"); }), DomainError);
}

TEST_CASE("CSV headers match the documented schemas") {
    const auto docs = documented_headers();
    REQUIRE(docs.size() == 8);

    auto exact = make(Command::Exact, 3, 1.0);
    CHECK(first_line(run(exact)) == docs.at("exact"));

    auto clt = make(Command::Clt, 5, 0.8);
    clt.instances = 2;
    CHECK(first_line(run(clt)) == docs.at("clt"));
    clt.with_exact = true;
    CHECK(first_line(run(clt)) == docs.at("clt --with-exact"));

    auto crit = make(Command::Critical, 5, 2.0 / 3.0);
    crit.instances = 2;
    CHECK(first_line(run(crit)) == docs.at("critical"));
    crit.with_exact = true;
    CHECK(first_line(run(crit)) == docs.at("critical --with-exact"));

    auto bday = make(Command::Birthday, 8, 0.8);
    bday.trials = 100;
    CHECK(first_line(run(bday)) == docs.at("birthday"));

    auto sample = make(Command::Sample, 6, 0.8);
    sample.trials = 5;
    CHECK(first_line(run(sample)) == docs.at("sample"));

    auto census = make(Command::Census, 4, 0.8);
    census.d_grid = {4, 5};
    CHECK(first_line(run(census)) == docs.at("census"));
}

TEST_CASE("manifest carries config, constants and version") {
    auto cfg = make(Command::Clt, 10, 0.8);
    cfg.instances = 3;
    Report rep;
    run(cfg, &rep);
    const auto& m = rep.manifest;
    CHECK(m.at("tool") == "cubeperc");
    CHECK(m.at("version") == CUBEPERC_VERSION);
    CHECK(m.at("config").at("d") == 10);
    CHECK_FALSE(m.at("config").contains("workers"));
    CHECK(m.at("theory").at("mu").get<double>() == doctest::Approx(mu_theory(10, 0.8)));
    CHECK(m.at("columns").size() == 8);

    auto crit = make(Command::Critical, 8, 2.0 / 3.0);
    crit.instances = 2;
    run(crit, &rep);
    const auto& ref = rep.manifest.at("reference_cdf");
    CHECK(ref.at("x").size() == 201);
    CHECK(ref.at("cdf").size() == 201);
}

TEST_CASE("exact JSON record") {
    auto cfg = make(Command::Exact, 3, 1.0);
    cfg.format = OutputFormat::Json;
    const auto rec = nlohmann::json::parse(first_line(run(cfg)));
    CHECK(rec.at("z_integer") == "35");
    CHECK(rec.at("defect_pmf").size() == 5);
    CHECK(rec.at("defect_pmf")[0].get<double>() == doctest::Approx(31.0 / 35.0));
    CHECK(rec.at("seed").get<std::uint64_t>() == 3232956451035279046ULL);
}

TEST_CASE("oracle cross-check") {
    auto cfg = make(Command::Exact, 4, 0.6);
    cfg.instances = 10;
    cfg.oracle = true;
    Report rep;
    run(cfg, &rep);
    CHECK(rep.summary.at("oracle_mismatches") == 0);
    CHECK(rep.passed);
}

TEST_CASE("output is byte-identical across worker counts") {
    std::vector<ExperimentConfig> cfgs;
    auto clt = make(Command::Clt, 12, 0.8);
    clt.instances = 40;
    cfgs.push_back(clt);
    auto bday = make(Command::Birthday, 12, 0.8);
    bday.instances = 6;
    bday.trials = 300;
    cfgs.push_back(bday);
    auto sample = make(Command::Sample, 10, 0.8);
    sample.instances = 3;
    sample.trials = 50;
    cfgs.push_back(sample);
    auto exact = make(Command::Exact, 4, 0.5);
    exact.instances = 12;
    cfgs.push_back(exact);
    for (auto cfg : cfgs) {
        cfg.workers = 1;
        const auto one = run(cfg);
        cfg.workers = 4;
        CHECK(run(cfg) == one);
    }
}

TEST_CASE("validation errors") {
    auto cfg = make(Command::Exact, 7, 0.5);
    CHECK_THROWS_AS(run(cfg), InfeasibleError);
    cfg = make(Command::Clt, 10, 0.5);
    cfg.regime = Regime::Supercritical;
    CHECK_THROWS_AS(run(cfg), DomainError);
}
