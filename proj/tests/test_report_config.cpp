#include <fstream>

#include <doctest.h>

#include "sublab/runner.hpp"

using namespace sublab;

namespace {

const char* kZooConfig = R"cfg(
# classify the warped-product family
[model]
zoo = "loubeau_ou"
[model.params]
c1 = 1.0
c2 = 1.0

[run]
points = 12
seed = 99
tol_h = 1e-7
tol_b = 1e-7

[output]
timestamp = false
)cfg";

const char* kInlineConfig = R"cfg(
[inline]
kind = "submersion"

[inline.total]
coords = ["x", "y", "t"]
box = [[0.1, 2.0], [-2, 2], [-2, 2]]
metric = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "exp(x^2)"]]

[inline.base]
coords = ["x", "y"]
box = [[0.1, 2.0], [-2, 2]]
metric = [["1", "0"], ["0", "1"]]

[inline.map]
components = ["x", "y"]

[run]
points = 10
seed = 7

[output]
timestamp = false
)cfg";

} // namespace

TEST_SUITE("report_config") {

TEST_CASE("toml subset") {
    auto t = toml::parse("a = 1.5\nb = \"str\"\nc = true\n[d.e]\nf = [1, 2, 3]\n");
    CHECK(toml::find(t, "a")->as_number() == 1.5);
    CHECK(toml::find(t, "b")->as_string() == "str");
    CHECK(toml::find(t, "c")->as_bool());
    const auto& e = toml::find(toml::find(t, "d")->as_table(), "e")->as_table();
    CHECK(toml::find(e, "f")->as_array().size() == 3);

    CHECK_THROWS_AS(toml::parse("a = 1\na = 2\n"), config_error);
    CHECK_THROWS_AS(toml::parse("a = \n"), config_error);
    CHECK_THROWS_AS(toml::parse("a = [1, 2\n"), config_error);
    CHECK_THROWS_AS(toml::parse("[t\nx = 1\n"), config_error);
    CHECK_THROWS_AS(toml::parse("x = \"unterminated\n"), config_error);
    try {
        toml::parse("ok = 1\nbad = @\n");
        FAIL("expected config_error");
    } catch (const config_error& e2) {
        CHECK(std::string(e2.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("config schema validation") {
    CHECK_THROWS_AS(config_from_toml("x = 1\n"), config_error);          // neither model nor inline
    CHECK_THROWS_AS(config_from_toml("[model]\n[inline]\n"), config_error); // both
    CHECK_THROWS_AS(config_from_toml("[model]\n"), config_error);        // missing zoo id
    CHECK_THROWS_AS(config_from_toml("[model]\nzoo = \"product\"\n[run]\npoints = 0\n"),
                    config_error);
    CHECK_THROWS_AS(config_from_toml("[inline]\nkind = \"submersion\"\n"), config_error);
}

TEST_CASE("run_check on a zoo config") {
    run_config cfg = config_from_toml(kZooConfig);
    CHECK(cfg.zoo.has_value());
    CHECK(cfg.run.points == 12);
    CHECK(!cfg.timestamp);
    run_report rep = run_check(cfg);
    CHECK(rep.cls.result == verdict::proper_biharmonic);
    CHECK(rep.cls.records.size() == 12);
    CHECK(rep.timestamp.empty());
}

TEST_CASE("run_check on an inline config reproduces warped_custom") {
    run_config cfg = config_from_toml(kInlineConfig);
    run_report rep = run_check(cfg);
    CHECK(rep.cls.result == verdict::neither);
}

TEST_CASE("json round trip preserves the verdict and the records") {
    run_config cfg = config_from_toml(kZooConfig);
    run_report rep = run_check(cfg);
    std::string text = report_to_json(rep);
    run_report back = report_from_json(text);
    CHECK(back.cls.result == rep.cls.result);
    CHECK(back.cls.records.size() == rep.cls.records.size());
    CHECK(verdict_from_records(back.cls) == rep.cls.result);
    CHECK(report_to_json(back) == text); // byte-identical re-emission
}

TEST_CASE("csv has one row per point plus the header") {
    run_config cfg = config_from_toml(kZooConfig);
    run_report rep = run_check(cfg);
    std::string csv = report_to_csv(rep);
    int rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    CHECK(rows == 13);
    CHECK(csv.find("norm_tau2_reduced_minus") != std::string::npos);
}

TEST_CASE("empty record set emits a header-only report") {
    run_report rep;
    rep.model_id = "product";
    std::string csv = report_to_csv(rep);
    int rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    CHECK(rows == 1);
    CHECK(report_to_json(rep).find("\"records\": []") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical reports") {
    run_config cfg = config_from_toml(kZooConfig);
    run_report a = run_check(cfg);
    run_report b = run_check(cfg);
    CHECK(report_to_json(a) == report_to_json(b));
    CHECK(report_to_csv(a) == report_to_csv(b));
}

TEST_CASE("einstein and eigenfunction blocks drive the Obata pass") {
    std::string text = R"cfg(
[model]
zoo = "cp1_round"
[run]
points = 8
seed = 5
[einstein]
c = 0.5
lambda1 = 1.0
eigenfunction = "cos(theta)"
[output]
timestamp = false
)cfg";
    run_config cfg = config_from_toml(text);
    run_report rep = run_check(cfg);
    REQUIRE(rep.obata.has_value());
    CHECK(rep.obata->worst_eigres <= 1e-8);
    CHECK(rep.obata->worst_r1 <= 1e-6);
    CHECK(rep.obata->worst_base <= 1e-9);
    CHECK(rep.cls.result == verdict::harmonic); // the identity map
}

TEST_CASE("atomic write lands the full content") {
    std::string path = "test_atomic_report.json";
    write_atomic(path, "{\"ok\": true}\n");
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "{\"ok\": true}\n");
    std::remove(path.c_str());
}

} // TEST_SUITE
