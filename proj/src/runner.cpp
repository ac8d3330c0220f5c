#include "sublab/runner.hpp"

#include <cmath>

#include "sublab/parallel.hpp"

namespace sublab {

run_report run_check(const run_config& cfg) {
    built_model bm = build_from_config(cfg);

    classify_config ccfg = cfg.run;
    if (!ccfg.einstein && bm.einstein) ccfg.einstein = bm.einstein;

    run_report rep;
    rep.model_id = bm.id;
    rep.params = bm.params;
    rep.expr_params = bm.expr_params;
    rep.is_submersion = bm.is_submersion();
    if (bm.is_submersion())
        rep.cls = classify(bm.as_submersion(), ccfg, bm.constants);
    else
        rep.cls = classify(std::get<smooth_map>(bm.object), ccfg, bm.constants);

    if (cfg.eigenfunction && ccfg.einstein) {
        const metric_field& base = bm.is_submersion() ? bm.as_submersion().pi.h : bm.as_map().g;
        scalar_expr f;
        try {
            f = parse_expr(*cfg.eigenfunction, base.ch.coords, bm.constants);
        } catch (const parse_error& pe) {
            throw config_error("bad eigenfunction '" + *cfg.eigenfunction + "': " + pe.what());
        }
        auto pts = sample_points(base.ch, std::min(cfg.run.points, 50), cfg.run.seed, bm.constants);
        obata_summary ob;
        ob.eigenfunction = *cfg.eigenfunction;
        ob.points = static_cast<int>(pts.size());
        std::vector<obata_residuals_result> results(pts.size());
        parallel_for(static_cast<int>(pts.size()), [&](int i) {
            results[i] = obata_residual(base, *ccfg.einstein, f, pts[i], bm.constants);
        });
        for (const auto& r : results) {
            ob.worst_base = std::max(ob.worst_base, r.base_residual);
            ob.worst_eigres = std::max(ob.worst_eigres, r.eigres);
            ob.worst_jres = std::max(ob.worst_jres, r.jres);
            ob.worst_r1 = std::max(ob.worst_r1, r.r1);
            ob.worst_r2 = std::max(ob.worst_r2, r.r2);
        }
        rep.obata = ob;
    }

    if (cfg.timestamp) rep.timestamp = iso_timestamp();
    return rep;
}

std::vector<point_record> evaluate_points(const built_model& bm, std::span<const point> pts,
                                          const std::optional<einstein_data>& ed) {
    std::vector<point_record> records(pts.size());
    std::optional<einstein_data> eff = ed ? ed : bm.einstein;
    parallel_for(static_cast<int>(pts.size()), [&](int i) {
        if (bm.is_submersion())
            records[i] = analyze_point(bm.as_submersion(), pts[i], bm.constants, eff);
        else
            records[i] = analyze_point(bm.as_map(), pts[i], bm.constants);
    });
    return records;
}

} // namespace sublab
