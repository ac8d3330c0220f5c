#include "sublab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sublab {

namespace {

double number_at(const toml::table& t, const std::string& key, double dflt) {
    const toml::value* v = toml::find(t, key);
    return v ? v->as_number() : dflt;
}

std::string string_at(const toml::table& t, const std::string& key, const std::string& dflt) {
    const toml::value* v = toml::find(t, key);
    return v ? v->as_string() : dflt;
}

inline_chart_def chart_def(const toml::table& t, const std::string& where) {
    inline_chart_def d;
    const toml::value* coords = toml::find(t, "coords");
    if (!coords) throw config_error(where + ": missing 'coords'");
    for (const auto& c : coords->as_array()) d.coords.push_back(c.as_string());
    const toml::value* box = toml::find(t, "box");
    if (!box) throw config_error(where + ": missing 'box'");
    for (const auto& b : box->as_array()) {
        const auto& pair = b.as_array();
        if (pair.size() != 2) throw config_error(where + ": box entries are [lo, hi] pairs");
        d.box.emplace_back(pair[0].as_number(), pair[1].as_number());
    }
    if (const toml::value* ex = toml::find(t, "exclude"))
        for (const auto& e : ex->as_array()) d.exclude.push_back(e.as_string());
    const toml::value* metric = toml::find(t, "metric");
    if (!metric) throw config_error(where + ": missing 'metric'");
    for (const auto& row : metric->as_array()) {
        std::vector<std::string> r;
        for (const auto& e : row.as_array()) r.push_back(e.as_string());
        d.metric.push_back(std::move(r));
    }
    std::size_t n = d.coords.size();
    if (d.box.size() != n || d.metric.size() != n)
        throw config_error(where + ": coords, box, and metric sizes disagree");
    for (const auto& row : d.metric)
        if (row.size() != n) throw config_error(where + ": metric must be " + std::to_string(n) +
                                                "x" + std::to_string(n));
    return d;
}

} // namespace

run_config config_from_toml(const std::string& text) {
    toml::table root = toml::parse(text);
    run_config cfg;

    const toml::value* model = toml::find(root, "model");
    const toml::value* inl = toml::find(root, "inline");
    if (!!model == !!inl)
        throw config_error("config needs exactly one of [model] (zoo) or [inline]");

    if (model) {
        const toml::table& mt = model->as_table();
        model_spec spec;
        spec.id = string_at(mt, "zoo", "");
        if (spec.id.empty()) throw config_error("[model] needs zoo = \"<id>\"");
        if (const toml::value* params = toml::find(mt, "params"))
            for (const auto& [k, v] : params->as_table()) spec.params[k] = v.as_number();
        if (const toml::value* exprs = toml::find(mt, "exprs"))
            for (const auto& [k, v] : exprs->as_table()) spec.expr_params[k] = v.as_string();
        cfg.zoo = std::move(spec);
    } else {
        const toml::table& it = inl->as_table();
        inline_model_def def;
        def.kind = string_at(it, "kind", "submersion");
        if (def.kind != "submersion" && def.kind != "map")
            throw config_error("[inline] kind must be \"submersion\" or \"map\"");
        const toml::value* total = toml::find(it, "total");
        if (!total) total = toml::find(it, "domain");
        const toml::value* base = toml::find(it, "base");
        if (!base) base = toml::find(it, "codomain");
        const toml::value* map = toml::find(it, "map");
        if (!total || !base || !map)
            throw config_error("[inline] needs [inline.total], [inline.base], [inline.map]");
        def.total = chart_def(total->as_table(), "[inline.total]");
        def.base = chart_def(base->as_table(), "[inline.base]");
        const toml::value* comps = toml::find(map->as_table(), "components");
        if (!comps) throw config_error("[inline.map] needs components = [...]");
        for (const auto& c : comps->as_array()) def.map_comps.push_back(c.as_string());
        cfg.inline_def = std::move(def);
    }

    if (const toml::value* consts = toml::find(root, "constants"))
        for (const auto& [k, v] : consts->as_table()) cfg.constants[k] = v.as_number();

    if (const toml::value* run = toml::find(root, "run")) {
        const toml::table& rt = run->as_table();
        double pts = number_at(rt, "points", cfg.run.points);
        if (pts < 1 || pts != std::floor(pts))
            throw config_error("[run] points must be a positive integer");
        cfg.run.points = static_cast<int>(pts);
        cfg.run.seed = static_cast<std::uint64_t>(number_at(rt, "seed", 20250801.0));
        cfg.run.tol_h = number_at(rt, "tol_h", cfg.run.tol_h);
        cfg.run.tol_b = number_at(rt, "tol_b", cfg.run.tol_b);
    }

    if (const toml::value* ein = toml::find(root, "einstein")) {
        const toml::table& et = ein->as_table();
        einstein_data ed;
        ed.c = number_at(et, "c", 0.0);
        ed.lambda1 = number_at(et, "lambda1", 0.0);
        cfg.run.einstein = ed;
        std::string f = string_at(et, "eigenfunction", "");
        if (!f.empty()) cfg.eigenfunction = f;
    }

    if (const toml::value* out = toml::find(root, "output")) {
        const toml::table& ot = out->as_table();
        std::string j = string_at(ot, "json", "");
        if (!j.empty()) cfg.out_json = j;
        std::string c = string_at(ot, "csv", "");
        if (!c.empty()) cfg.out_csv = c;
        if (const toml::value* ts = toml::find(ot, "timestamp")) cfg.timestamp = ts->as_bool();
    }
    return cfg;
}

run_config config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_toml(ss.str());
}

namespace {

chart build_chart(const inline_chart_def& d, const const_map& consts) {
    chart c;
    c.coords = d.coords;
    c.box = d.box;
    for (const auto& e : d.exclude) {
        try {
            c.keep_positive.push_back(parse_expr(e, c.coords, consts));
        } catch (const parse_error& pe) {
            throw config_error("bad exclusion expression '" + e + "': " + pe.what());
        }
    }
    c.validate();
    return c;
}

metric_field build_metric(const inline_chart_def& d, chart ch, const const_map& consts) {
    int n = ch.dim();
    metric_field m;
    m.ch = std::move(ch);
    m.entries.resize(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (d.metric[i][j] != d.metric[j][i])
                throw config_error("inline metric must be symmetric entry-wise");
            try {
                m.at(i, j) = parse_expr(d.metric[i][j], m.ch.coords, consts);
            } catch (const parse_error& pe) {
                throw config_error("bad metric entry '" + d.metric[i][j] + "': " + pe.what());
            }
        }
    return m;
}

} // namespace

built_model build_from_config(const run_config& cfg) {
    if (cfg.zoo) {
        built_model bm = build_model(*cfg.zoo);
        for (const auto& [k, v] : cfg.constants) bm.constants[k] = v;
        return bm;
    }
    const inline_model_def& def = *cfg.inline_def;
    chart total = build_chart(def.total, cfg.constants);
    chart base = build_chart(def.base, cfg.constants);
    smooth_map m;
    m.g = build_metric(def.total, std::move(total), cfg.constants);
    m.h = build_metric(def.base, std::move(base), cfg.constants);
    for (const auto& c : def.map_comps) {
        try {
            m.comps.push_back(parse_expr(c, m.g.ch.coords, cfg.constants));
        } catch (const parse_error& pe) {
            throw config_error("bad map component '" + c + "': " + pe.what());
        }
    }
    m.validate();
    built_model bm;
    bm.id = "inline";
    bm.constants = cfg.constants;
    if (cfg.run.einstein) bm.einstein = cfg.run.einstein;
    if (def.kind == "submersion") {
        riemannian_submersion s;
        s.pi = std::move(m);
        s.validate();
        bm.object = std::move(s);
    } else {
        bm.object = std::move(m);
    }
    return bm;
}

} // namespace sublab
