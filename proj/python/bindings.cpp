#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "sublab/runner.hpp"

namespace py = pybind11;
using namespace sublab;

namespace {

py::object json_to_py(const nlohmann::ordered_json& j) {
    switch (j.type()) {
    case nlohmann::ordered_json::value_t::null: return py::none();
    case nlohmann::ordered_json::value_t::boolean: return py::bool_(j.get<bool>());
    case nlohmann::ordered_json::value_t::number_integer:
        return py::int_(j.get<std::int64_t>());
    case nlohmann::ordered_json::value_t::number_unsigned:
        return py::int_(j.get<std::uint64_t>());
    case nlohmann::ordered_json::value_t::number_float: return py::float_(j.get<double>());
    case nlohmann::ordered_json::value_t::string: return py::str(j.get<std::string>());
    case nlohmann::ordered_json::value_t::array: {
        py::list out;
        for (const auto& e : j) out.append(json_to_py(e));
        return out;
    }
    case nlohmann::ordered_json::value_t::object: {
        py::dict out;
        for (const auto& [k, v] : j.items()) out[py::str(k)] = json_to_py(v);
        return out;
    }
    default: return py::none();
    }
}

py::dict report_to_dict(const run_report& rep) {
    return json_to_py(nlohmann::ordered_json::parse(report_to_json(rep)));
}

model_spec spec_of(const std::string& id, const std::map<std::string, double>& params,
                   const std::map<std::string, std::string>& exprs) {
    return model_spec{id, params, exprs};
}

py::dict check_model_py(const std::string& id, const std::map<std::string, double>& params,
                        const std::map<std::string, std::string>& exprs, int points,
                        std::uint64_t seed, double tol_h, double tol_b) {
    run_config cfg;
    cfg.zoo = spec_of(id, params, exprs);
    cfg.run.points = points;
    cfg.run.seed = seed;
    cfg.run.tol_h = tol_h;
    cfg.run.tol_b = tol_b;
    cfg.timestamp = false;
    return report_to_dict(run_check(cfg));
}

py::dict run_config_py(const std::string& toml_text) {
    return report_to_dict(run_check(config_from_toml(toml_text)));
}

py::dict point_dict(const built_model& bm, const point& p) {
    point_record r;
    if (bm.is_submersion())
        r = analyze_point(bm.as_submersion(), p, bm.constants, bm.einstein);
    else
        r = analyze_point(bm.as_map(), p, bm.constants);
    py::dict out;
    out["point"] = r.coords;
    out["tau"] = r.tau;
    out["tau2"] = r.tau2;
    if (r.tau2_red_plus) out["tau2_red_plus"] = *r.tau2_red_plus;
    if (r.tau2_red_minus) out["tau2_red_minus"] = *r.tau2_red_minus;
    if (r.div_x) out["div_x"] = *r.div_x;
    if (r.r1) out["r1"] = *r.r1;
    if (r.r2) out["r2"] = *r.r2;
    return out;
}

py::dict tension_at_py(const std::string& id, const std::map<std::string, double>& params,
                       const std::map<std::string, std::string>& exprs,
                       const std::vector<double>& p) {
    built_model bm = build_model(spec_of(id, params, exprs));
    map_jets m(bm.as_map(), p, bm.constants);
    tension_result t = tension(m);
    py::dict out;
    out["tau"] = values(t.tau);
    out["norm"] = h_norm(m, t.tau);
    out["normalized"] = normalized(h_norm(m, t.tau), t.scale);
    return out;
}

py::dict bitension_at_py(const std::string& id, const std::map<std::string, double>& params,
                         const std::map<std::string, std::string>& exprs,
                         const std::vector<double>& p) {
    built_model bm = build_model(spec_of(id, params, exprs));
    py::dict out = point_dict(bm, p);
    map_jets m(bm.as_map(), p, bm.constants);
    bitension_result b = bitension(m);
    out["tau2_vector"] = values(b.tau2);
    return out;
}

double eval_expr_py(const std::string& text, const std::vector<std::string>& coords,
                    const std::map<std::string, double>& consts, const std::vector<double>& p) {
    const_map cm(consts.begin(), consts.end());
    return eval_value(parse_expr(text, coords, cm), p, cm);
}

double expr_partial_py(const std::string& text, const std::vector<std::string>& coords,
                       const std::map<std::string, double>& consts, const std::vector<double>& p,
                       const std::vector<int>& multi_index) {
    const_map cm(consts.begin(), consts.end());
    jet j = eval_jet(parse_expr(text, coords, cm), lift_point(p), cm);
    return j.partial(multi_index);
}

double fd_partial_py(const std::string& text, const std::vector<std::string>& coords,
                     const std::map<std::string, double>& consts, const std::vector<double>& p,
                     const std::vector<int>& multi_index) {
    const_map cm(consts.begin(), consts.end());
    return fd_check(parse_expr(text, coords, cm), p, multi_index, cm);
}

py::list self_validate_py(std::uint64_t seed) {
    py::list out;
    for (const auto& s : self_validate(seed)) {
        py::dict d;
        d["name"] = s.name;
        d["pass"] = s.pass;
        d["worst"] = s.worst;
        d["detail"] = s.detail;
        out.append(d);
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_sublab, m) {
    m.doc() = "tension/bitension verification engine for maps and Riemannian submersions";
    m.attr("__version__") = "0.1.0";

    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<build_error>(m, "BuildError", PyExc_ValueError);
    py::register_exception<parse_error>(m, "ExprParseError", PyExc_ValueError);

    m.def("zoo_ids", &zoo_ids, "built-in model identifiers");
    m.def("check_model", &check_model_py, py::arg("id"),
          py::arg("params") = std::map<std::string, double>{},
          py::arg("exprs") = std::map<std::string, std::string>{}, py::arg("points") = 100,
          py::arg("seed") = 20250801, py::arg("tol_h") = 1e-7, py::arg("tol_b") = 1e-7,
          "classify a zoo model and return the full report as a dict");
    m.def("run_config", &run_config_py, py::arg("toml_text"),
          "run a TOML configuration and return the report as a dict");
    m.def("tension_at", &tension_at_py, py::arg("id"),
          py::arg("params") = std::map<std::string, double>{},
          py::arg("exprs") = std::map<std::string, std::string>{}, py::arg("point"),
          "tension field of a zoo model at one chart point");
    m.def("bitension_at", &bitension_at_py, py::arg("id"),
          py::arg("params") = std::map<std::string, double>{},
          py::arg("exprs") = std::map<std::string, std::string>{}, py::arg("point"),
          "bitension data of a zoo model at one chart point");
    m.def("eval_expr", &eval_expr_py, py::arg("text"), py::arg("coords"), py::arg("consts"),
          py::arg("point"), "evaluate a scalar expression");
    m.def("expr_partial", &expr_partial_py, py::arg("text"), py::arg("coords"), py::arg("consts"),
          py::arg("point"), py::arg("multi_index"),
          "exact partial derivative via jet evaluation");
    m.def("fd_partial", &fd_partial_py, py::arg("text"), py::arg("coords"), py::arg("consts"),
          py::arg("point"), py::arg("multi_index"),
          "finite-difference oracle for the same partial derivative");
    m.def("self_validate", &self_validate_py, py::arg("seed") = 20250801,
          "run the invariant suites on the model zoo");
}
