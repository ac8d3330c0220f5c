#include <cmath>

#include <doctest.h>

#include "sublab/validate.hpp"
#include "sublab/zoo.hpp"

using namespace sublab;

TEST_SUITE("zoo") {

TEST_CASE("registry") {
    auto ids = zoo_ids();
    CHECK(ids.size() == 10);
    for (const auto& id : ids) CHECK_NOTHROW(build_model({id, {}, {}}));
    CHECK_THROWS_AS(build_model({"moebius", {}, {}}), build_error);
    CHECK_THROWS_AS(build_model({"product", {{"radius", 2.0}}, {}}), build_error);
}

TEST_CASE("every built submersion satisfies the submersion axioms") {
    for (const auto& spec : validation_zoo_submersions()) {
        built_model bm = build_model(spec);
        auto pts = sample_points(bm.domain_chart(), 100, 5, bm.constants);
        double worst_iso = 0.0, worst_on = 0.0;
        for (const auto& p : pts) {
            submersion_jets s(bm.as_submersion(), p, bm.constants);
            CHECK(differential_rank(s.mj()) == s.n());
            worst_iso = std::max(worst_iso, s.isometry_residual());
            worst_on = std::max(worst_on, s.orthonormality_residual());
        }
        CAPTURE(spec.id);
        CHECK(worst_iso <= 1e-8);
        CHECK(worst_on <= 1e-10);
    }
}

TEST_CASE("loubeau_ou closed form is verified for other parameters too") {
    CHECK_NOTHROW(build_model({"loubeau_ou", {{"c1", 2.0}, {"c2", 0.5}}, {}}));
    CHECK_NOTHROW(build_model({"loubeau_ou", {{"c1", -1.0}, {"c2", 3.0}}, {}}));
}

TEST_CASE("flag model is a product for l in {0,1}") {
    for (double l : {0.0, 1.0}) {
        built_model bm = build_model({"flag_local", {{"l", l}}, {}});
        auto pts = sample_points(bm.domain_chart(), 25, 77, bm.constants);
        for (const auto& p : pts) {
            submersion_jets s(bm.as_submersion(), p, bm.constants);
            CHECK(std::abs(s.kappa(0).value()) <= 1e-9);
            CHECK(std::abs(s.kappa(1).value()) <= 1e-9);
            tension_result t = tension(s.mj());
            CHECK(normalized(h_norm(s.mj(), t.tau), t.scale) <= 1e-9);
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(build_model({"loubeau_ou", {{"c1", 0.0}}, {}}), build_error);
    CHECK_THROWS_AS(build_model({"loubeau_ou", {{"c2", -1.0}}, {}}), build_error);
    CHECK_THROWS_AS(build_model({"flag_local", {{"a", 1.0}, {"b", 0.0}, {"c", 2.0}, {"d", 0.0}}, {}}),
                    build_error); // ad - bc = 0
    CHECK_THROWS_AS(build_model({"flag_local", {{"l", -1.0}}, {}}), build_error);
    CHECK_THROWS_AS(build_model({"flag_local", {{"l", 1.5}}, {}}), build_error);
    CHECK_THROWS_AS(build_model({"inversion", {{"n", 7.0}}, {}}), build_error);
    CHECK_THROWS_AS(build_model({"berger", {{"eps", 0.0}}, {}}), build_error);
    CHECK_THROWS_AS(build_model({"s2_round", {{"r", -2.0}}, {}}), build_error);
    CHECK_THROWS_AS(build_model({"warped_custom", {}, {{"beta", "exp(x"}}}), parse_error);
}

TEST_CASE("einstein data attached to the curved models") {
    built_model cp1 = build_model({"cp1_round", {}, {}});
    REQUIRE(cp1.einstein.has_value());
    CHECK(cp1.einstein->c == doctest::Approx(0.5));
    CHECK(cp1.einstein->lambda1 == doctest::Approx(1.0));

    built_model hopf = build_model({"hopf", {}, {}});
    REQUIRE(hopf.einstein.has_value());
    CHECK(hopf.einstein->c == doctest::Approx(4.0)); // S^2(1/2)

    built_model su2 = build_model({"su2_round", {}, {}});
    REQUIRE(su2.einstein.has_value());
    CHECK(su2.einstein->c == doctest::Approx(2.0));
}

TEST_CASE("berger spheres stay harmonic across the scaling family") {
    classify_config cfg;
    cfg.points = 15;
    cfg.seed = 3;
    for (double eps : {0.3, 0.7, 1.4}) {
        built_model bm = build_model({"berger", {{"eps", eps}}, {}});
        classification_report rep = classify(bm.as_submersion(), cfg, bm.constants);
        CAPTURE(eps);
        CHECK(rep.result == verdict::harmonic);
    }
}

} // TEST_SUITE
