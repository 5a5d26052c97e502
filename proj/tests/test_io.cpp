#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ppmm/analysis.hpp"
#include "ppmm/csv.hpp"
#include "ppmm/error.hpp"
#include "ppmm/rng.hpp"
#include "ppmm/serialize.hpp"

using namespace ppmm;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected ppmm::Error");
    return ErrorCode::InvalidArgument;
}

// y depends linearly on z1 and on region; about 20% of outcomes missing.
RawTable synthetic_table(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    RawTable t;
    t.names = {"id", "z1", "region", "const", "y"};
    t.columns.resize(5);
    const char* regions[] = {"north", "south", "east", "west"};
    for (std::size_t i = 0; i < n; ++i) {
        const double z1 = rng.normal();
        const int region = static_cast<int>(rng.uniform() * 4);
        const double y = 1.0 + 0.8 * z1 + 0.3 * region + rng.normal();
        t.columns[0].push_back(std::to_string(i));
        t.columns[1].push_back(format_double(z1));
        t.columns[2].push_back(regions[region]);
        t.columns[3].push_back("7");
        t.columns[4].push_back(rng.uniform() < 0.2 ? "NA" : format_double(y));
    }
    return t;
}

}  // namespace

TEST_CASE("parse_csv handles quoting and line endings") {
    std::istringstream in("\xEF\xBB\xBF" "a,b,c\r\n1,\"x, y\",3\r\n\"he said \"\"hi\"\"\",,NA\n\n4,\"multi\nline\",6\n");
    const RawTable t = parse_csv(in);
    REQUIRE(t.names == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows() == 3);
    CHECK(t.columns[1][0] == "x, y");
    CHECK(t.columns[0][1] == "he said \"hi\"");
    CHECK(t.columns[1][1].empty());
    CHECK(is_missing_cell(t.columns[2][1]));
    CHECK(t.columns[1][2] == "multi\nline");
}

TEST_CASE("parse_csv reports ragged rows with a line number") {
    std::istringstream in("a,b\n1,2\n3\n");
    try {
        parse_csv(in);
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream open("a\n\"unterminated\n");
    CHECK(code_of([&] { parse_csv(open); }) == ErrorCode::Parse);
}

TEST_CASE("write_series_csv marks gaps") {
    CurveSeries s;
    s.points = {{0.0, 1.0, {}}, {0.5, std::nullopt, "bad"}, {1.0, 0.25, {}}};
    std::ostringstream out;
    write_series_csv(out, s);
    CHECK(out.str() == "abscissa,value,valid\n0,1,1\n0.5,,0\n1,0.25,1\n");
}

TEST_CASE("mechanism configs parse from objects and arrays") {
    const auto one = parse_mechanisms(
        R"({"id": "hps", "respondent": {"mu_x": 2.75, "mu_y": 2.75, "var_x": 0.96, "var_y": 12.0, "cov_xy": 0.96},
            "nonresp_mu_x": 3.04, "nonresp_var_x": 1.02, "pi": 0.823})");
    REQUIRE(one.size() == 1);
    CHECK(one[0].id == "hps");
    CHECK(one[0].respondent.var_y == 12.0);

    const json all = builtin_mechanisms();
    const auto back = parse_mechanisms(all.dump());
    CHECK(back == builtin_mechanisms());

    CHECK(code_of([] { parse_mechanisms("{\"id\": 1}"); }) == ErrorCode::Parse);
    CHECK(code_of([] {
              parse_mechanisms(R"({"id": "x", "respondent": {"mu_x": 0, "mu_y": 0, "var_x": 1, "var_y": 1,
                                   "cov_xy": 0}, "nonresp_mu_x": 0, "nonresp_var_x": 1, "pi": 1.5})");
          }) == ErrorCode::InvalidArgument);
}

TEST_CASE("analyze_table end to end") {
    AnalyzeOptions opt;
    opt.outcome = "y";
    opt.exclude = {"id"};
    const AnalysisReport rep = analyze_table(synthetic_table(3000, 5), opt);

    CHECK(rep.respondents + rep.nonrespondents == 3000);
    CHECK(rep.summary.pi == doctest::Approx(0.8).epsilon(0.05));
    // intercept, z1, three region indicators; "const" dropped
    REQUIRE(rep.proxy_coefficients.size() == 5);
    CHECK(rep.proxy_coefficients[1].name == "z1");
    CHECK(rep.proxy_coefficients[1].value == doctest::Approx(0.8).epsilon(0.1));
    REQUIRE(rep.warnings.size() == 1);
    CHECK(rep.warnings[0].find("const") != std::string::npos);
    CHECK(rep.respondent_rho * rep.respondent_rho == doctest::Approx(rep.r_squared).epsilon(1e-8));
    // OLS: the fitted proxy has the outcome's respondent mean and cov(proxy, y) = var(proxy)
    CHECK(rep.summary.respondent.mu_x == doctest::Approx(rep.summary.respondent.mu_y).epsilon(1e-10));
    CHECK(rep.summary.respondent.cov_xy == doctest::Approx(rep.summary.respondent.var_x).epsilon(1e-10));
    // three OR series, five probability series, one mean series
    CHECK(rep.series.size() == 9);
}

TEST_CASE("analyze_table input errors") {
    AnalyzeOptions opt;
    opt.outcome = "y";
    RawTable t = synthetic_table(200, 6);
    for (auto& cell : t.columns[4]) {
        if (cell == "NA") cell = "1.5";
    }
    CHECK(code_of([&] { analyze_table(t, opt); }) == ErrorCode::InsufficientPattern);

    RawTable bad = synthetic_table(50, 7);
    bad.columns[4][10] = "abc";
    try {
        analyze_table(bad, opt);
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
        CHECK(std::string(e.what()).find("line 12") != std::string::npos);
    }

    opt.outcome = "nope";
    CHECK(code_of([&] { analyze_table(t, opt); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("outcome sums are missing when any item is missing") {
    RawTable t;
    t.names = {"z", "a", "b"};
    t.columns = {{"1", "2", "3", "4", "5", "6", "7"},
                 {"1", "2", "NA", "1", "0", "3", "2"},
                 {"0", "1", "1", "", "2", "2", "1"}};
    AnalyzeOptions opt;
    opt.outcome_sum = {"a", "b"};
    opt.prob_phi_levels = {0.0};
    const auto rep = analyze_table(t, opt);
    CHECK(rep.respondents == 5);
    CHECK(rep.nonrespondents == 2);
    REQUIRE(rep.proxy_coefficients.size() == 2);  // intercept + z; a, b are not covariates
}

TEST_CASE("analyze reads CSV files") {
    const auto dir = std::filesystem::temp_directory_path() / "ppmm_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "data.csv";
    {
        const RawTable t = synthetic_table(400, 8);
        std::ofstream out(path);
        for (std::size_t c = 0; c < t.names.size(); ++c) out << (c ? "," : "") << t.names[c];
        out << '\n';
        for (std::size_t i = 0; i < t.rows(); ++i) {
            for (std::size_t c = 0; c < t.names.size(); ++c) out << (c ? "," : "") << t.columns[c][i];
            out << '\n';
        }
    }
    AnalyzeOptions opt;
    opt.outcome = "y";
    opt.exclude = {"id"};
    const auto from_file = analyze(path.string(), opt);
    CHECK(from_file == analyze_table(synthetic_table(400, 8), opt));
    std::filesystem::remove_all(dir);
}

TEST_CASE("property: JSON reports round-trip exactly") {
    AnalyzeOptions opt;
    opt.outcome = "y";
    opt.exclude = {"id"};
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const AnalysisReport rep = analyze_table(synthetic_table(500, seed), opt);
        const json j = rep;
        const AnalysisReport back = json::parse(j.dump()).get<AnalysisReport>();
        CHECK(back == rep);
    }

    // a report with gaps and validation entries
    ValidationReport v;
    v.oracle.push_back({"1", 1.0, true, "InvalidIdentification: x", 0.0, true});
    v.oracle.push_back({"7", 0.3, false, "", 3.1e-15, true});
    v.recovery.push_back({"10", 0.5, 9, 200000, false, "", true, {{"lambda0", -1.1, -1.09, 0.02, 0.5}}, true});
    v.max_discrepancy = 3.1e-15;
    const ValidationReport vb = json::parse(json(v).dump()).get<ValidationReport>();
    CHECK(vb == v);
}
