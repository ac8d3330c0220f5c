#include "sublab/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <nlohmann/json.hpp>

namespace sublab {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

void put_opt(ordered_json& j, const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
}

std::optional<double> get_opt(const ordered_json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    return j[key].get<double>();
}

} // namespace

verdict verdict_from_records(const classification_report& c) {
    double max_tau = 0.0, max_tau2 = 0.0;
    for (const auto& r : c.records) {
        max_tau = std::max(max_tau, r.tau);
        max_tau2 = std::max(max_tau2, r.tau2);
    }
    if (max_tau <= c.cfg.tol_h) return verdict::harmonic;
    if (max_tau2 <= c.cfg.tol_b) return verdict::proper_biharmonic;
    return verdict::neither;
}

std::string report_to_json(const run_report& r) {
    ordered_json j;
    j["sublab_version"] = kVersion;
    if (!r.timestamp.empty()) j["timestamp"] = r.timestamp;
    j["model"] = {{"id", r.model_id},
                  {"kind", r.is_submersion ? "submersion" : "map"},
                  {"params", r.params},
                  {"exprs", r.expr_params}};
    j["run"] = {{"points", r.cls.cfg.points},
                {"seed", r.cls.cfg.seed},
                {"tol_h", r.cls.cfg.tol_h},
                {"tol_b", r.cls.cfg.tol_b}};
    if (r.cls.cfg.einstein)
        j["einstein"] = {{"c", r.cls.cfg.einstein->c}, {"lambda1", r.cls.cfg.einstein->lambda1}};
    j["conventions"] = {
        {"laplacian", "delta d (nonnegative spectrum); lap f = -div grad f"},
        {"curvature", "R(U,V) = nabla_U nabla_V - nabla_V nabla_U - nabla_[U,V]"},
        {"X", "X = sum_i kappa_i eps_i = -tau(pi)"},
        {"residuals", "norm / (1 + sum of constituent norms)"}};
    if (r.is_submersion) {
        j["sign_variant"] = {
            {"resolved", r.cls.sign_resolution},
            {"plus_matched", r.cls.sign_plus_matched},
            {"minus_matched", r.cls.sign_minus_matched},
            {"note", "tau2 = -lap_h X + s grad_X X + Ric X; variants s=+1 (as printed in the "
                     "theorem) and s=-1 (as printed in the derivation) are both evaluated against "
                     "the definitional bitension"}};
    }
    ordered_json recs = ordered_json::array();
    for (std::size_t i = 0; i < r.cls.records.size(); ++i) {
        const point_record& p = r.cls.records[i];
        ordered_json pr;
        pr["index"] = i;
        pr["point"] = p.coords;
        pr["tau"] = p.tau;
        pr["tau2"] = p.tau2;
        put_opt(pr, "tau2_red_plus", p.tau2_red_plus);
        put_opt(pr, "tau2_red_minus", p.tau2_red_minus);
        put_opt(pr, "match_plus", p.match_plus);
        put_opt(pr, "match_minus", p.match_minus);
        put_opt(pr, "div_x", p.div_x);
        put_opt(pr, "r1", p.r1);
        put_opt(pr, "r2", p.r2);
        put_opt(pr, "base_einstein", p.base_einstein);
        put_opt(pr, "vertical_kappa", p.vertical_kappa);
        put_opt(pr, "isometry", p.isometry);
        put_opt(pr, "hor_remainder", p.hor_remainder);
        recs.push_back(std::move(pr));
    }
    j["records"] = std::move(recs);
    j["summary"] = {{"max_tau", r.cls.max_tau},
                    {"min_tau", r.cls.min_tau},
                    {"max_tau2", r.cls.max_tau2}};
    j["verdict"] = to_string(r.cls.result);
    if (r.obata) {
        j["obata"] = {{"eigenfunction", r.obata->eigenfunction},
                      {"points", r.obata->points},
                      {"worst_base_einstein", r.obata->worst_base},
                      {"worst_eigres", r.obata->worst_eigres},
                      {"worst_jres", r.obata->worst_jres},
                      {"worst_r1", r.obata->worst_r1},
                      {"worst_r2", r.obata->worst_r2}};
    }
    if (!r.suites.empty()) {
        ordered_json s = ordered_json::array();
        for (const auto& su : r.suites)
            s.push_back({{"name", su.name}, {"pass", su.pass}, {"worst", su.worst},
                         {"detail", su.detail}});
        j["suites"] = std::move(s);
    }
    return j.dump(2) + "\n";
}

run_report report_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    run_report r;
    r.timestamp = j.value("timestamp", "");
    r.model_id = j["model"]["id"].get<std::string>();
    r.is_submersion = j["model"]["kind"].get<std::string>() == "submersion";
    for (const auto& [k, v] : j["model"]["params"].items()) r.params[k] = v.get<double>();
    for (const auto& [k, v] : j["model"]["exprs"].items()) r.expr_params[k] = v.get<std::string>();
    r.cls.cfg.points = j["run"]["points"].get<int>();
    r.cls.cfg.seed = j["run"]["seed"].get<std::uint64_t>();
    r.cls.cfg.tol_h = j["run"]["tol_h"].get<double>();
    r.cls.cfg.tol_b = j["run"]["tol_b"].get<double>();
    if (j.contains("einstein"))
        r.cls.cfg.einstein = einstein_data{j["einstein"]["c"].get<double>(),
                                           j["einstein"]["lambda1"].get<double>()};
    r.cls.is_submersion = r.is_submersion;
    for (const auto& pr : j["records"]) {
        point_record p;
        p.coords = pr["point"].get<std::vector<double>>();
        p.tau = pr["tau"].get<double>();
        p.tau2 = pr["tau2"].get<double>();
        p.tau2_red_plus = get_opt(pr, "tau2_red_plus");
        p.tau2_red_minus = get_opt(pr, "tau2_red_minus");
        p.match_plus = get_opt(pr, "match_plus");
        p.match_minus = get_opt(pr, "match_minus");
        p.div_x = get_opt(pr, "div_x");
        p.r1 = get_opt(pr, "r1");
        p.r2 = get_opt(pr, "r2");
        p.base_einstein = get_opt(pr, "base_einstein");
        p.vertical_kappa = get_opt(pr, "vertical_kappa");
        p.isometry = get_opt(pr, "isometry");
        p.hor_remainder = get_opt(pr, "hor_remainder");
        r.cls.records.push_back(std::move(p));
    }
    r.cls.max_tau = j["summary"]["max_tau"].get<double>();
    r.cls.min_tau = j["summary"]["min_tau"].get<double>();
    r.cls.max_tau2 = j["summary"]["max_tau2"].get<double>();
    std::string v = j["verdict"].get<std::string>();
    r.cls.result = v == "HARMONIC"            ? verdict::harmonic
                   : v == "PROPER_BIHARMONIC" ? verdict::proper_biharmonic
                                              : verdict::neither;
    if (j.contains("sign_variant")) {
        r.cls.sign_resolution = j["sign_variant"]["resolved"].get<std::string>();
        r.cls.sign_plus_matched = j["sign_variant"]["plus_matched"].get<int>();
        r.cls.sign_minus_matched = j["sign_variant"]["minus_matched"].get<int>();
    }
    return r;
}

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string opt17(const std::optional<double>& v) { return v ? g17(*v) : ""; }

} // namespace

std::string report_to_csv(const run_report& r) {
    std::string out;
    int dim = r.cls.records.empty() ? 0 : static_cast<int>(r.cls.records[0].coords.size());
    out += "index";
    for (int i = 0; i < dim; ++i) out += ",x" + std::to_string(i);
    out += ",norm_tau,norm_tau2_general,norm_tau2_reduced_plus,norm_tau2_reduced_minus,div_x,r1,r2\n";
    for (std::size_t i = 0; i < r.cls.records.size(); ++i) {
        const point_record& p = r.cls.records[i];
        out += std::to_string(i);
        for (double c : p.coords) out += "," + g17(c);
        out += "," + g17(p.tau) + "," + g17(p.tau2) + "," + opt17(p.tau2_red_plus) + "," +
               opt17(p.tau2_red_minus) + "," + opt17(p.div_x) + "," + opt17(p.r1) + "," +
               opt17(p.r2) + "\n";
    }
    return out;
}

void write_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("short write to '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
}

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

} // namespace sublab
