#include "sublab/zoo.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace sublab {

namespace {

std::string lit(double v) {
    std::array<char, 40> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

chart make_chart(std::vector<std::string> coords, std::vector<std::pair<double, double>> box,
                 std::vector<std::string> keep = {}, const const_map& consts = {}) {
    chart c;
    c.coords = std::move(coords);
    c.box = std::move(box);
    for (const auto& k : keep) c.keep_positive.push_back(parse_expr(k, c.coords, consts));
    c.validate();
    return c;
}

metric_field make_metric(chart ch, const std::vector<std::vector<std::string>>& entries,
                         const const_map& consts) {
    int d = ch.dim();
    metric_field m;
    m.ch = std::move(ch);
    m.entries.resize(d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (entries[i][j] != entries[j][i])
                throw build_error("metric entries must be symmetric");
            m.at(i, j) = parse_expr(entries[i][j], m.ch.coords, consts);
        }
    return m;
}

std::vector<scalar_expr> make_comps(const chart& dom, const std::vector<std::string>& texts,
                                    const const_map& consts) {
    std::vector<scalar_expr> comps;
    for (const auto& t : texts) comps.push_back(parse_expr(t, dom.coords, consts));
    return comps;
}

class param_reader {
public:
    param_reader(const model_spec& s) : spec_(s) {}
    double get(const std::string& k, double dflt) {
        seen_.insert(k);
        auto it = spec_.params.find(k);
        return it == spec_.params.end() ? dflt : it->second;
    }
    std::string get_expr(const std::string& k, const std::string& dflt) {
        seen_expr_.insert(k);
        auto it = spec_.expr_params.find(k);
        return it == spec_.expr_params.end() ? dflt : it->second;
    }
    void finish() const {
        for (const auto& [k, v] : spec_.params)
            if (!seen_.count(k))
                throw build_error("model '" + spec_.id + "' has no parameter '" + k + "'");
        for (const auto& [k, v] : spec_.expr_params)
            if (!seen_expr_.count(k))
                throw build_error("model '" + spec_.id + "' has no expression parameter '" + k + "'");
    }

private:
    const model_spec& spec_;
    std::set<std::string> seen_, seen_expr_;
};

built_model finish(built_model bm, const model_spec& spec) {
    bm.id = spec.id;
    bm.params = spec.params;
    bm.expr_params = spec.expr_params;
    if (bm.is_submersion()) bm.as_submersion().validate();
    else std::get<smooth_map>(bm.object).validate();
    return bm;
}

built_model build_product(const model_spec& spec) {
    param_reader pr(spec);
    pr.finish();
    chart total = make_chart({"x", "y", "t"}, {{-2, 2}, {-2, 2}, {-2, 2}});
    chart base = make_chart({"x", "y"}, {{-2, 2}, {-2, 2}});
    riemannian_submersion s;
    s.pi.g = metric_field::euclidean(total);
    s.pi.h = metric_field::euclidean(base);
    s.pi.comps = make_comps(total, {"x", "y"}, {});
    built_model bm;
    bm.object = std::move(s);
    return finish(std::move(bm), spec);
}

built_model build_inversion(const model_spec& spec) {
    param_reader pr(spec);
    int n = static_cast<int>(pr.get("n", 4));
    pr.finish();
    if (n < 2 || n > kJetMaxDim)
        throw build_error("inversion: n must be in 2.." + std::to_string(kJetMaxDim));
    std::vector<std::string> coords;
    for (int i = 1; i <= n; ++i) coords.push_back("x" + std::to_string(i));
    std::string r2 = "x1^2";
    for (int i = 2; i <= n; ++i) r2 += " + x" + std::to_string(i) + "^2";
    // annulus 0.5 <= |x| <= 2
    chart dom = make_chart(coords, std::vector<std::pair<double, double>>(n, {-2.0, 2.0}),
                           {"(" + r2 + ") - 0.25", "4 - (" + r2 + ")"});
    chart cod = make_chart(coords, std::vector<std::pair<double, double>>(n, {-3.0, 3.0}));
    smooth_map phi;
    phi.g = metric_field::euclidean(dom);
    phi.h = metric_field::euclidean(cod);
    std::vector<std::string> comps;
    for (int i = 1; i <= n; ++i) comps.push_back("x" + std::to_string(i) + "/(" + r2 + ")");
    phi.comps = make_comps(dom, comps, {});
    built_model bm;
    bm.object = std::move(phi);
    return finish(std::move(bm), spec);
}

built_model build_warped(const std::string& beta, const const_map& consts,
                         bool verify_loubeau_ou) {
    chart total = make_chart({"x", "y", "t"}, {{0.1, 2.0}, {-2, 2}, {-2, 2}}, {}, consts);
    chart base = make_chart({"x", "y"}, {{0.1, 2.0}, {-2, 2}}, {}, consts);
    riemannian_submersion s;
    s.pi.g = make_metric(total,
                         {{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "(" + beta + ")^2"}},
                         consts);
    s.pi.h = metric_field::euclidean(base);
    s.pi.comps = make_comps(total, {"x", "y"}, consts);

    if (verify_loubeau_ou) {
        // the closed form for beta comes from beta'/beta = f; check it here
        std::vector<std::string> xc{"x"};
        scalar_expr b = parse_expr(beta, xc, consts);
        scalar_expr f = parse_expr("-c1*(1 + exp(c1*x))/(1 - exp(c1*x))", xc, consts);
        for (double x : {0.15, 0.5, 1.0, 1.5, 1.9}) {
            jet_vec xl = lift_point(std::vector<double>{x});
            jet bj = eval_jet(b, xl, consts);
            double lhs = derivative(bj, 0).value() / bj.value();
            double rhs = eval_value(f, std::vector<double>{x}, consts);
            if (std::abs(lhs - rhs) > 1e-9 * (1.0 + std::abs(rhs)))
                throw build_error("loubeau_ou: beta'/beta != f at x=" + lit(x));
        }
    }
    built_model bm;
    bm.object = std::move(s);
    bm.constants = consts;
    return bm;
}

built_model build_loubeau_ou(const model_spec& spec) {
    param_reader pr(spec);
    double c1 = pr.get("c1", 1.0), c2 = pr.get("c2", 1.0);
    pr.finish();
    if (c1 == 0.0) throw build_error("loubeau_ou: c1 must be nonzero");
    if (!(c2 > 0.0)) throw build_error("loubeau_ou: c2 must be positive");
    const_map consts{{"c1", c1}, {"c2", c2}};
    std::string beta = "c2*exp(-c1*x)*(1 - exp(c1*x))^2";
    return finish(build_warped(beta, consts, true), spec);
}

built_model build_warped_custom(const model_spec& spec) {
    param_reader pr(spec);
    std::string beta = pr.get_expr("beta", "exp(x^2/2)");
    pr.finish();
    return finish(build_warped(beta, {}, false), spec);
}

built_model build_hopf_like(double eps) {
    if (eps <= 0.0) throw build_error("berger: eps must be positive");
    const_map consts{{"eps", eps}};
    // S^3 in Euler angles, fibers along psi; 1e-2 clearance from the
    // coordinate singularities at sin(theta) = 0
    chart total = make_chart({"theta", "phi", "psi"},
                             {{0.15, 2.99}, {0.1, 6.18}, {0.1, 6.18}}, {}, consts);
    chart base = make_chart({"theta", "phi"}, {{0.15, 2.99}, {0.1, 6.18}});
    riemannian_submersion s;
    s.pi.g = make_metric(
        total,
        {{"0.25", "0", "0"},
         {"0", "0.25*(sin(theta)^2 + eps^2*cos(theta)^2)", "0.25*eps^2*cos(theta)"},
         {"0", "0.25*eps^2*cos(theta)", "0.25*eps^2"}},
        consts);
    s.pi.h = make_metric(base, {{"0.25", "0"}, {"0", "0.25*sin(theta)^2"}}, consts);
    s.pi.comps = make_comps(total, {"theta", "phi"}, consts);
    built_model bm;
    bm.object = std::move(s);
    bm.constants = consts;
    bm.einstein = einstein_data{4.0, 8.0}; // base S^2(1/2)
    return bm;
}

built_model build_flag_local(const model_spec& spec) {
    param_reader pr(spec);
    double l = pr.get("l", 2.0);
    double a = pr.get("a", 1.0), b = pr.get("b", 0.0), c = pr.get("c", 0.0), d = pr.get("d", 1.0);
    double A = pr.get("A", 1.0), B = pr.get("B", 1.0), C = pr.get("C", 1.0);
    std::string h11 = pr.get_expr("h11", "1"), h12 = pr.get_expr("h12", "0"),
                h22 = pr.get_expr("h22", "1");
    pr.finish();
    if (l < 0.0 || l != std::floor(l)) throw build_error("flag_local: l must be a nonnegative integer");
    double det = a * d - b * c;
    if (std::abs(det) < 1e-9)
        throw build_error("flag_local: ad - bc = 0 makes e1, e2 dependent");
    double rho = C * l * (l - 1.0);
    const_map consts{{"rho", rho}, {"A", A}, {"B", B}};

    // metric dual to the declared orthonormal frame
    // e1 = a ds + b dt (components), e2 = c ds + d dt, e3 = e^{rho u (As+Bt)} du
    double gss = (d * d + b * b) / (det * det);
    double gst = -(d * c + a * b) / (det * det);
    double gtt = (c * c + a * a) / (det * det);
    chart total = make_chart({"s", "t", "u"}, {{-0.75, 0.75}, {-0.75, 0.75}, {-0.75, 0.75}},
                             {}, consts);
    chart base = make_chart({"s", "t"}, {{-0.75, 0.75}, {-0.75, 0.75}});
    riemannian_submersion sub;
    sub.pi.g = make_metric(total,
                           {{lit(gss), lit(gst), "0"},
                            {lit(gst), lit(gtt), "0"},
                            {"0", "0", "exp(-2*rho*u*(A*s + B*t))"}},
                           consts);
    sub.pi.h = make_metric(base, {{h11, h12}, {h12, h22}}, consts);
    sub.pi.comps = make_comps(total, {"s", "t"}, consts);
    built_model bm;
    bm.object = std::move(sub);
    bm.constants = consts;
    bm.einstein = einstein_data{0.5, 1.0};
    return finish(std::move(bm), spec);
}

built_model build_s2_round(const model_spec& spec, double r_default) {
    param_reader pr(spec);
    double r = pr.get("r", r_default);
    pr.finish();
    if (!(r > 0.0)) throw build_error("s2_round: radius must be positive");
    const_map consts{{"r2", r * r}};
    chart ch = make_chart({"theta", "phi"}, {{0.15, 2.99}, {0.1, 6.18}}, {}, consts);
    metric_field h = make_metric(ch, {{"r2", "0"}, {"0", "r2*sin(theta)^2"}}, consts);
    built_model bm;
    bm.object = smooth_map::identity(h);
    bm.constants = consts;
    bm.einstein = einstein_data{1.0 / (r * r), 2.0 / (r * r)};
    return bm;
}

built_model build_su2_round(const model_spec& spec) {
    param_reader pr(spec);
    pr.finish();
    chart ch = make_chart({"theta", "phi", "psi"}, {{0.15, 2.99}, {0.1, 6.18}, {0.1, 6.18}});
    metric_field g = make_metric(ch,
                                 {{"0.25", "0", "0"},
                                  {"0", "0.25", "0.25*cos(theta)"},
                                  {"0", "0.25*cos(theta)", "0.25"}},
                                 {});
    built_model bm;
    bm.object = smooth_map::identity(g);
    bm.einstein = einstein_data{2.0, 3.0};
    return finish(std::move(bm), spec);
}

} // namespace

built_model build_model(const model_spec& spec) {
    if (spec.id == "product") return build_product(spec);
    if (spec.id == "inversion") return build_inversion(spec);
    if (spec.id == "loubeau_ou") return build_loubeau_ou(spec);
    if (spec.id == "warped_custom") return build_warped_custom(spec);
    if (spec.id == "hopf") {
        param_reader pr(spec);
        pr.finish();
        return finish(build_hopf_like(1.0), spec);
    }
    if (spec.id == "berger") {
        param_reader pr(spec);
        double eps = pr.get("eps", 0.5);
        pr.finish();
        return finish(build_hopf_like(eps), spec);
    }
    if (spec.id == "flag_local") return build_flag_local(spec);
    if (spec.id == "cp1_round") return finish(build_s2_round(spec, std::sqrt(2.0)), spec);
    if (spec.id == "s2_round") return finish(build_s2_round(spec, 1.0), spec);
    if (spec.id == "su2_round") return build_su2_round(spec);
    throw build_error("unknown model '" + spec.id + "'; known: " + zoo_help());
}

std::vector<std::string> zoo_ids() {
    return {"product",  "inversion", "loubeau_ou", "warped_custom", "hopf",
            "berger",   "flag_local", "cp1_round",  "s2_round",     "su2_round"};
}

std::string zoo_help() {
    return "product | inversion(n) | loubeau_ou(c1,c2) | warped_custom(beta=expr) | hopf | "
           "berger(eps) | flag_local(l,a,b,c,d,A,B,C) | cp1_round | s2_round(r) | su2_round";
}

} // namespace sublab
