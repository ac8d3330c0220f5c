#include <cmath>

#include <doctest.h>

#include "sublab/geometry.hpp"
#include "sublab/zoo.hpp"

using namespace sublab;

namespace {

metric_field flat2() {
    chart c;
    c.coords = {"x", "y"};
    c.box = {{-2, 2}, {-2, 2}};
    return metric_field::euclidean(std::move(c));
}

metric_field warped_exp() {
    // dx^2 + dy^2 + exp(x^2) dt^2, i.e. beta = exp(x^2/2)
    chart c;
    c.coords = {"x", "y", "t"};
    c.box = {{-1.5, 1.5}, {-2, 2}, {-2, 2}};
    metric_field m;
    m.ch = c;
    std::vector<std::string> none;
    std::vector<std::string> rows{"1", "0", "0", "0", "1", "0", "0", "0", "exp(x^2)"};
    m.entries.resize(9);
    for (int i = 0; i < 9; ++i) m.entries[i] = parse_expr(rows[i], c.coords, none);
    return m;
}

metric_field sphere(double r) {
    built_model bm = build_model({"s2_round", {{"r", r}}, {}});
    return bm.as_map().g;
}

// Independent route to Gamma^k_{ij}: Koszul formula with finite-difference
// metric derivatives, plain double inversion.
double fd_christoffel(const metric_field& g, const point& p, const const_map& consts, int k,
                      int i, int j) {
    const int n = g.ch.dim();
    std::vector<double> G(n * n), Ginv(n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) G[a * n + b] = eval_value(g.at(a, b), p, consts);
    // Gauss-Jordan inverse
    std::vector<double> aug(n * 2 * n, 0.0);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) aug[a * 2 * n + b] = G[a * n + b];
        aug[a * 2 * n + n + a] = 1.0;
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(aug[r * 2 * n + col]) > std::abs(aug[piv * 2 * n + col])) piv = r;
        for (int c = 0; c < 2 * n; ++c) std::swap(aug[piv * 2 * n + c], aug[col * 2 * n + c]);
        double d = aug[col * 2 * n + col];
        for (int c = 0; c < 2 * n; ++c) aug[col * 2 * n + c] /= d;
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = aug[r * 2 * n + col];
            for (int c = 0; c < 2 * n; ++c) aug[r * 2 * n + c] -= f * aug[col * 2 * n + c];
        }
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) Ginv[a * n + b] = aug[a * 2 * n + n + b];

    auto dg = [&](int v, int a, int b) {
        std::vector<int> mi(n, 0);
        mi[v] = 1;
        return fd_check(g.at(a, b), p, mi, consts);
    };
    double s = 0.0;
    for (int l = 0; l < n; ++l) s += Ginv[k * n + l] * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
    return 0.5 * s;
}

} // namespace

TEST_SUITE("geometry") {

TEST_CASE("flat metric has vanishing Christoffel symbols and curvature") {
    metric_field g = flat2();
    metric_jets m(g, std::vector<double>{0.3, -0.7}, {});
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(m.gamma(k, i, j).value() == 0.0);
    for (int l = 0; l < 2; ++l)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) CHECK(m.riemann(l, i, j, k).value() == 0.0);
}

TEST_CASE("warped metric Christoffels against the Koszul/FD oracle") {
    metric_field g = warped_exp();
    point p{0.7, 0.2, -1.1};
    metric_jets m(g, p, {});
    // closed forms: Gamma^t_{xt} = beta'/beta = x, Gamma^x_{tt} = -beta beta' = -x e^{x^2}
    CHECK(m.gamma(2, 0, 2).value() == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(m.gamma(0, 2, 2).value() ==
          doctest::Approx(-0.7 * std::exp(0.49)).epsilon(1e-12));
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                double fd = fd_christoffel(g, p, {}, k, i, j);
                CHECK(std::abs(m.gamma(k, i, j).value() - fd) <= 1e-6 * (1.0 + std::abs(fd)));
            }
}

TEST_CASE("round sphere Christoffel") {
    metric_field h = sphere(std::sqrt(2.0));
    point p{0.9, 1.4};
    metric_jets m(h, p, const_map{{"r2", 2.0}});
    CHECK(m.gamma(0, 1, 1).value() ==
          doctest::Approx(-std::sin(0.9) * std::cos(0.9)).epsilon(1e-12));
    double fd = fd_christoffel(h, p, const_map{{"r2", 2.0}}, 0, 1, 1);
    CHECK(std::abs(m.gamma(0, 1, 1).value() - fd) <= 1e-6);
}

TEST_CASE("curvature of the round models") {
    const_map k2{{"r2", 2.0}};
    metric_field cp1 = sphere(std::sqrt(2.0));
    metric_jets m(cp1, std::vector<double>{1.1, 2.0}, k2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(m.ricci(i, j).value() ==
                  doctest::Approx(0.5 * m.G().at(i, j).value()).epsilon(1e-10));
            CHECK(m.ricci_endo(i, j).value() ==
                  doctest::Approx(i == j ? 0.5 : 0.0).epsilon(1e-10));
        }

    built_model su2 = build_model({"su2_round", {}, {}});
    metric_jets s(su2.as_map().g, std::vector<double>{1.2, 2.1, 0.8}, su2.constants);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(s.ricci(i, j).value() - 2.0 * s.G().at(i, j).value()) <= 1e-9);
}

TEST_CASE("lie brackets") {
    metric_field g = flat2();
    metric_jets m(g, std::vector<double>{0.4, 0.9}, {});
    std::vector<std::string> none;
    vector_field dx{g.ch, {parse_expr("1", g.ch.coords, none), parse_expr("0", g.ch.coords, none)}};
    vector_field dy{g.ch, {parse_expr("0", g.ch.coords, none), parse_expr("1", g.ch.coords, none)}};
    jet_vec br = lie_bracket(m, dx, dy, {});
    CHECK(value_norm(br) == 0.0);

    vector_field xdx{g.ch,
                     {parse_expr("x", g.ch.coords, none), parse_expr("0", g.ch.coords, none)}};
    jet_vec br2 = lie_bracket(m, dx, xdx, {});
    CHECK(br2[0].value() == doctest::Approx(1.0));
    CHECK(br2[1].value() == 0.0);
}

TEST_CASE("Loubeau-Ou frame bracket and vertical covariant derivative") {
    built_model bm = build_model({"loubeau_ou", {}, {}});
    const metric_field& g = bm.as_submersion().pi.g;
    point p{0.8, 0.0, 0.5};
    metric_jets m(g, p, bm.constants);
    std::vector<std::string> coords = g.ch.coords;
    vector_field e1{g.ch,
                    {parse_expr("1", coords, bm.constants), parse_expr("0", coords, bm.constants),
                     parse_expr("0", coords, bm.constants)}};
    std::string invb = "1/(c2*exp(-c1*x)*(1 - exp(c1*x))^2)";
    vector_field e3{g.ch,
                    {parse_expr("0", coords, bm.constants), parse_expr("0", coords, bm.constants),
                     parse_expr(invb, coords, bm.constants)}};
    double u = std::exp(0.8);
    double f = -(1.0 + u) / (1.0 - u); // = beta'/beta
    double beta = std::exp(-0.8) * (1.0 - u) * (1.0 - u);

    // [d_x, (1/beta) d_t] = -(beta'/beta) (1/beta) d_t
    jet_vec br = lie_bracket(m, e1, e3, bm.constants);
    CHECK(br[0].value() == 0.0);
    CHECK(br[1].value() == 0.0);
    CHECK(br[2].value() == doctest::Approx(-f / beta).epsilon(1e-11));

    // nabla_{e3} e3 = kappa_1 e1 with kappa_1 = -beta'/beta
    jet_vec e3j = eval_field(e3, m.x(), bm.constants);
    jet_vec nab = covariant_derivative(m, e3j, e3j);
    CHECK(nab[0].value() == doctest::Approx(-f).epsilon(1e-11));
    CHECK(std::abs(nab[1].value()) < 1e-12);
    CHECK(std::abs(nab[2].value()) < 1e-12);
}

TEST_CASE("covariant derivative basics and metric compatibility") {
    metric_field g = flat2();
    metric_jets m(g, std::vector<double>{0.2, 0.4}, {});
    jet_vec constant{jet::constant(2, 1.0), jet::constant(2, -2.0)};
    jet_vec dir{jet::constant(2, 0.3), jet::constant(2, 0.7)};
    CHECK(value_norm(covariant_derivative(m, constant, dir)) == 0.0);

    // d g(X,Y) = g(nabla X, Y) + g(X, nabla Y) along each coordinate
    built_model bm = build_model({"hopf", {}, {}});
    const metric_field& gh = bm.as_submersion().pi.g;
    metric_jets mh(gh, std::vector<double>{1.0, 2.0, 3.0}, bm.constants);
    jet_vec X{mh.x()[0] * mh.x()[0], sin(mh.x()[2]), mh.x()[1]};
    jet_vec Y{cos(mh.x()[1]), mh.x()[0], jet::constant(3, 1.0)};
    for (int k = 0; k < 3; ++k) {
        jet_vec ek(3, jet::constant(3, 0.0));
        ek[k] = jet::constant(3, 1.0);
        jet lhs = derivative(metric_dot(mh.G(), X, Y), k);
        jet rhs = metric_dot(mh.G(), covariant_derivative(mh, X, ek), Y) +
                  metric_dot(mh.G(), X, covariant_derivative(mh, Y, ek));
        CHECK(std::abs(lhs.value() - rhs.value()) <= 1e-9);
    }
}

TEST_CASE("gradient, divergence, Laplacian") {
    const_map k2{{"r2", 2.0}};
    metric_field h = sphere(std::sqrt(2.0));
    metric_jets m(h, std::vector<double>{0.8, 2.5}, k2);
    std::vector<std::string> none;

    scalar_expr c = parse_expr("4", h.ch.coords, none);
    CHECK(value_norm(gradient(m, c, k2)) == 0.0);
    CHECK(laplacian(m, c, k2).value() == 0.0);

    // height eigenfunction on S^2(sqrt 2): lap f = f (lambda_1 = 1)
    scalar_expr f = parse_expr("cos(theta)", h.ch.coords, none);
    CHECK(laplacian(m, f, k2).value() == doctest::Approx(std::cos(0.8)).epsilon(1e-11));

    // div grad = -lap under the delta d convention
    scalar_expr w = parse_expr("sin(theta)*cos(phi)", h.ch.coords, none);
    jet dv = divergence(m, gradient(m, w, k2));
    CHECK(std::abs(dv.value() + laplacian(m, w, k2).value()) <= 1e-9);

    // rotation field is divergence free
    vector_field rot{h.ch, {parse_expr("0", h.ch.coords, none), parse_expr("1", h.ch.coords, none)}};
    CHECK(std::abs(divergence(m, rot, k2).value()) <= 1e-9);
}

TEST_CASE("Killing residuals") {
    const_map k2{{"r2", 2.0}};
    metric_field h = sphere(std::sqrt(2.0));
    metric_jets m(h, std::vector<double>{1.2, 0.7}, k2);
    std::vector<std::string> none;

    vector_field zero{h.ch, {parse_expr("0", h.ch.coords, none), parse_expr("0", h.ch.coords, none)}};
    CHECK(killing_residual(m, zero, k2) == 0.0);

    vector_field rotz{h.ch, {parse_expr("0", h.ch.coords, none), parse_expr("1", h.ch.coords, none)}};
    CHECK(killing_residual(m, rotz, k2) <= 1e-9);

    // a rotation about an equatorial axis, not a coordinate field
    vector_field rotx{h.ch,
                      {parse_expr("sin(phi)", h.ch.coords, none),
                       parse_expr("cos(theta)*cos(phi)/sin(theta)", h.ch.coords, none)}};
    CHECK(killing_residual(m, rotx, k2) <= 1e-9);

    metric_field g = flat2();
    metric_jets mf(g, std::vector<double>{0.5, 0.1}, {});
    vector_field grad_x2{g.ch,
                         {parse_expr("2*x", g.ch.coords, none), parse_expr("0", g.ch.coords, none)}};
    CHECK(killing_residual(mf, grad_x2, {}) > 0.1);
}

TEST_CASE("degenerate metric raises at the offending point") {
    metric_field h = sphere(1.0);
    CHECK_THROWS_AS(metric_jets(h, std::vector<double>{1e-9, 1.0}, const_map{{"r2", 1.0}}),
                    degenerate_metric_error);
}

TEST_CASE("negative control: a corrupted Christoffel sign breaks compatibility") {
    metric_field g = warped_exp();
    point p{0.7, 0.2, -1.1};
    metric_jets m(g, p, {});
    // honest residual
    auto residual = [&](double flip) {
        double worst = 0.0;
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double v = derivative(m.G().at(i, j), k).value();
                    double sgn = 1.0;
                    for (int l = 0; l < 3; ++l) {
                        // flip corrupts one symbol class
                        sgn = (l == 2 && k == 0) ? flip : 1.0;
                        v -= sgn * m.gamma(l, k, i).value() * m.G().at(l, j).value() +
                             m.gamma(l, k, j).value() * m.G().at(i, l).value();
                    }
                    worst = std::max(worst, std::abs(v));
                }
        return worst;
    };
    CHECK(residual(1.0) <= 1e-9);
    CHECK(residual(-1.0) > 1e-3);
}

TEST_CASE("first Bianchi and Ricci symmetry on a curved model") {
    built_model bm = build_model({"berger", {}, {}});
    metric_jets m(bm.as_map().g, std::vector<double>{1.3, 2.2, 1.9}, bm.constants);
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    double v = m.riemann(l, i, j, k).value() + m.riemann(l, j, k, i).value() +
                               m.riemann(l, k, i, j).value();
                    CHECK(std::abs(v) <= 1e-9);
                }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(m.ricci(i, j).value() - m.ricci(j, i).value()) <= 1e-9);
}

} // TEST_SUITE
