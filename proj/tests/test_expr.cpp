#include <cmath>

#include <doctest.h>

#include "sublab/expr.hpp"

using namespace sublab;

namespace {
const std::vector<std::string> kXY{"x", "y"};
const std::vector<std::string> kX{"x"};
} // namespace

TEST_SUITE("expr") {

TEST_CASE("parse and evaluate") {
    scalar_expr e = parse_expr("x^2 + y^2", kXY, const_map{});
    CHECK(eval_value(e, std::vector<double>{3.0, 4.0}, {}) == doctest::Approx(25.0));
}

TEST_CASE("the warped-product profile function") {
    const_map consts{{"c1", 1.0}};
    scalar_expr f = parse_expr("-c1*(1 + exp(c1*x))/(1 - exp(c1*x))", kX, consts);
    double x = 1.0, u = std::exp(x);
    double expect = -(1.0 + u) / (1.0 - u);
    CHECK(eval_value(f, std::vector<double>{x}, consts) == doctest::Approx(expect).epsilon(1e-14));

    // constants bind at evaluation, not parse
    const_map swept{{"c1", 2.0}};
    double u2 = std::exp(2.0 * x);
    CHECK(eval_value(f, std::vector<double>{x}, swept) ==
          doctest::Approx(-2.0 * (1.0 + u2) / (1.0 - u2)).epsilon(1e-14));
}

TEST_CASE("parse errors carry spans") {
    CHECK_THROWS_AS(parse_expr("x + ", kXY, const_map{}), parse_error);
    try {
        parse_expr("x + ", kXY, const_map{});
    } catch (const parse_error& pe) {
        CHECK(pe.pos == 4);
        CHECK(pe.message.find("end of input") != std::string::npos);
    }
    try {
        parse_expr("x + zz*2", kXY, const_map{});
        FAIL("expected parse_error");
    } catch (const parse_error& pe) {
        CHECK(pe.message.find("zz") != std::string::npos);
        CHECK(pe.pos == 4);
        CHECK(pe.len == 2);
    }
    CHECK_THROWS_AS(parse_expr("exp(x, y)", kXY, const_map{}), parse_error);
    CHECK_THROWS_AS(parse_expr("y(3)", kXY, const_map{}), parse_error);
    CHECK_THROWS_AS(parse_expr("1e+", kXY, const_map{}), parse_error);
    CHECK_THROWS_AS(parse_expr("(x", kXY, const_map{}), parse_error);
    CHECK_THROWS_AS(parse_expr("x $ y", kXY, const_map{}), parse_error);
}

TEST_CASE("precedence and associativity") {
    const_map none;
    std::vector<double> p{2.0, 3.0};
    CHECK(eval_value(parse_expr("-x^2", kXY, none), p, {}) == doctest::Approx(-4.0));
    CHECK(eval_value(parse_expr("2^-2", kXY, none), p, {}) == doctest::Approx(0.25));
    CHECK(eval_value(parse_expr("x - y - 1", kXY, none), p, {}) == doctest::Approx(-2.0));
    CHECK(eval_value(parse_expr("x / y / 2", kXY, none), p, {}) == doctest::Approx(1.0 / 3.0));
    CHECK(eval_value(parse_expr("x^2^3", kXY, none), p, {}) == doctest::Approx(256.0));
    CHECK(eval_value(parse_expr("2*x + 3*y", kXY, none), p, {}) == doctest::Approx(13.0));
    CHECK(eval_value(parse_expr(" x ^ 2+ y ^2 ", kXY, none), p, {}) == doctest::Approx(13.0));
}

TEST_CASE("jet evaluation of constants") {
    scalar_expr c = parse_expr("3.5", kXY, const_map{});
    jet j = eval_jet(c, lift_point(std::vector<double>{1.0, 2.0}), {});
    CHECK(j.value() == 3.5);
    std::vector<int> d1{1, 0};
    CHECK(j.partial(d1) == 0.0);
}

TEST_CASE("profile-function derivatives match the oracle") {
    const_map consts{{"c1", 1.0}};
    scalar_expr f = parse_expr("-c1*(1 + exp(c1*x))/(1 - exp(c1*x))", kX, consts);
    for (double x : {0.4, 0.7, 1.3, 1.9}) {
        std::vector<double> p{x};
        jet j = eval_jet(f, lift_point(p), consts);
        for (int k = 1; k <= 3; ++k) {
            std::vector<int> mi{k};
            double jd = j.partial(mi);
            double fd = fd_check(f, p, mi, consts);
            CHECK(std::abs(jd - fd) <= 1e-6 * (1.0 + std::abs(fd)));
        }
    }
}

TEST_CASE("beta solves beta'/beta = f") {
    const_map consts{{"c1", 1.0}, {"c2", 1.0}};
    scalar_expr beta = parse_expr("c2*exp(-c1*x)*(1 - exp(c1*x))^2", kX, consts);
    scalar_expr f = parse_expr("-c1*(1 + exp(c1*x))/(1 - exp(c1*x))", kX, consts);
    for (int i = 0; i < 20; ++i) {
        double x = 0.1 + 1.9 * i / 19.0;
        std::vector<double> p{x};
        jet b = eval_jet(beta, lift_point(p), consts);
        std::vector<int> d1{1};
        double ratio = b.partial(d1) / b.value();
        CHECK(std::abs(ratio - eval_value(f, p, consts)) <= 1e-9 * (1.0 + std::abs(ratio)));
    }
}

TEST_CASE("fd_check basics") {
    scalar_expr x2 = parse_expr("x^2", kX, const_map{});
    std::vector<int> d1{1}, d2{2}, d3{3};
    CHECK(std::abs(fd_check(x2, std::vector<double>{1.0}, d1, {}) - 2.0) <= 1e-9);
    scalar_expr ex = parse_expr("exp(x)", kX, const_map{});
    CHECK(std::abs(fd_check(ex, std::vector<double>{0.0}, d2, {}) - 1.0) <= 1e-6);
    scalar_expr sn = parse_expr("sin(x)", kX, const_map{});
    CHECK(std::abs(fd_check(sn, std::vector<double>{0.0}, d3, {}) - (-1.0)) <= 1e-4);
}

TEST_CASE("fd_check reports stencil failures near domain edges") {
    scalar_expr lg = parse_expr("log(x)", kX, const_map{});
    std::vector<int> d1{1};
    CHECK_THROWS_AS(fd_check(lg, std::vector<double>{1e-7}, d1, {}), eval_error);
}

TEST_CASE("print/parse is a fixed point") {
    const_map consts{{"c1", 1.0}, {"c2", 2.0}};
    std::vector<std::string> cases{
        "x^2 + y^2",
        "-c1*(1 + exp(c1*x))/(1 - exp(c1*x))",
        "c2*exp(-c1*x)*(1 - exp(c1*x))^2",
        "x - (y - 1)",
        "(x + y)*(x - y)",
        "-x^2",
        "2^-2*x",
        "x/(y*(x + 1))",
        "sin(cos(x))*sqrt(1 + y^2)",
        "x^2^3",
        "-(x + y)",
        "1/(x + 0.5)/y",
        "x*y/(x - y + 10)",
        "log(exp(x) + 1)",
    };
    for (const auto& s : cases) {
        scalar_expr once = parse_expr(s, kXY, consts);
        std::string printed = once.str();
        scalar_expr twice = parse_expr(printed, kXY, consts);
        CHECK(twice.str() == printed);
        // and the normalization preserves the value
        std::vector<double> p{0.3, 0.8};
        CHECK(eval_value(once, p, consts) ==
              doctest::Approx(eval_value(twice, p, consts)).epsilon(1e-15));
    }
}

TEST_CASE("eval errors point into the source") {
    scalar_expr bad = parse_expr("1/(x - 1)", kX, const_map{});
    std::vector<double> p{1.0};
    CHECK_THROWS_AS(eval_value(bad, p, {}), eval_error);
    CHECK_THROWS_AS(eval_jet(bad, lift_point(p), {}), eval_error);
    scalar_expr sq = parse_expr("sqrt(x)", kX, const_map{});
    std::vector<double> neg{-2.0};
    CHECK_THROWS_AS(eval_value(sq, neg, {}), eval_error);
    scalar_expr pw = parse_expr("x^y", kXY, const_map{});
    std::vector<double> p2{-1.0, 0.5};
    CHECK_THROWS_AS(eval_value(pw, p2, {}), eval_error);
}

} // TEST_SUITE
