// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Every tolerance is pinned here, none deferred to calibration.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "sublab/parallel.hpp"
#include "sublab/runner.hpp"

using namespace sublab;

namespace {

int g_failures = 0;

void report_line(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d: %-34s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

constexpr std::uint64_t kSeed = 20250801;

// criteria 1-2: the inversion of R^n on the annulus 0.5 <= |x| <= 2
void inversion_criteria() {
    built_model inv4 = build_model({"inversion", {{"n", 4}}, {}});
    auto pts = sample_points(inv4.domain_chart(), 100, kSeed, inv4.constants);
    double worst_tau = 0.0, worst_tau2 = 0.0;
    std::vector<double> tau_gap(pts.size()), tau2_norm(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int i) {
        map_jets m(inv4.as_map(), pts[i], inv4.constants);
        tension_result t = tension(m);
        double r2 = 0.0;
        for (double c : pts[i]) r2 += c * c;
        jet_vec closed;
        for (double c : pts[i]) closed.push_back(jet::constant(4, -4.0 * c / (r2 * r2)));
        tau_gap[i] = normalized_diff(m, t.tau, closed);
        bitension_result b = bitension(m);
        tau2_norm[i] = normalized(h_norm(m, b.tau2), b.scale);
    });
    for (std::size_t i = 0; i < pts.size(); ++i) {
        worst_tau = std::max(worst_tau, tau_gap[i]);
        worst_tau2 = std::max(worst_tau2, tau2_norm[i]);
    }
    std::ostringstream d1;
    d1 << "n=4: |tau + 4x/|x|^4| <= 1e-7 (worst " << worst_tau << "), |tau2| <= 1e-6 (worst "
       << worst_tau2 << ") at 100 points";
    report_line(1, "inversion n=4 proper biharmonic", worst_tau <= 1e-7 && worst_tau2 <= 1e-6,
                d1.str());

    built_model inv3 = build_model({"inversion", {{"n", 3}}, {}});
    auto pts3 = sample_points(inv3.domain_chart(), 100, kSeed, inv3.constants);
    std::vector<double> t2(pts3.size());
    parallel_for(static_cast<int>(pts3.size()), [&](int i) {
        map_jets m(inv3.as_map(), pts3[i], inv3.constants);
        bitension_result b = bitension(m);
        t2[i] = normalized(h_norm(m, b.tau2), b.scale);
    });
    int big = 0;
    for (double v : t2)
        if (v > 1e-3) ++big;
    std::ostringstream d2;
    d2 << big << "/100 points with |tau2| > 1e-3 (need >= 90)";
    report_line(2, "inversion n=3 control", big >= 90, d2.str());
}

void loubeau_ou_criterion() {
    built_model lo = build_model({"loubeau_ou", {{"c1", 1.0}, {"c2", 1.0}}, {}});
    classify_config cfg;
    cfg.points = 100;
    cfg.seed = kSeed;
    classification_report rep = classify(lo.as_submersion(), cfg, lo.constants);
    bool pass = rep.result == verdict::proper_biharmonic && rep.max_tau2 <= 1e-6 &&
                rep.min_tau >= 1e-2;
    std::ostringstream d;
    d << to_string(rep.result) << ", max|tau2| " << rep.max_tau2 << " (<= 1e-6), min|tau| "
      << rep.min_tau << " (>= 1e-2), 100 points";
    report_line(3, "Loubeau-Ou proper biharmonic", pass, d.str());
}

void hopf_criterion() {
    built_model hopf = build_model({"hopf", {}, {}});
    auto pts = sample_points(hopf.domain_chart(), 100, kSeed, hopf.constants);
    std::vector<double> taus(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int i) {
        map_jets m(hopf.as_map(), pts[i], hopf.constants);
        tension_result t = tension(m);
        taus[i] = normalized(h_norm(m, t.tau), t.scale);
    });
    double worst = 0.0;
    for (double v : taus) worst = std::max(worst, v);

    double worst_kappa = 0.0;
    for (double l : {0.0, 1.0}) {
        built_model fl = build_model({"flag_local", {{"l", l}}, {}});
        auto fp = sample_points(fl.domain_chart(), 100, kSeed + 1, fl.constants);
        for (const auto& p : fp) {
            submersion_jets s(fl.as_submersion(), p, fl.constants);
            for (int i = 0; i < s.n(); ++i)
                worst_kappa = std::max(worst_kappa, std::abs(s.kappa(i).value()));
        }
    }
    std::ostringstream d;
    d << "|tau(pi)| <= 1e-7 at 100 points (worst " << worst << "); flag l in {0,1} worst |kappa| "
      << worst_kappa << " (<= 1e-9)";
    report_line(4, "Hopf l=1 harmonic, flag l<=1 flat", worst <= 1e-7 && worst_kappa <= 1e-9,
                d.str());
}

void reduced_formula_criterion() {
    // Reduced tension must match the trace on every zoo submersion. For the
    // bitension exactly one printed sign variant must match the definitional
    // oracle at every point where the reduction's fiber-invariance
    // hypothesis e_{n+1}(kappa) = 0 holds (it fails by construction on the
    // flag model with l >= 2, where the match is restored by adding back the
    // dropped vertical term; that corrected identity is asserted instead).
    double worst_tension = 0.0, worst_minus = 0.0, worst_corrected = 0.0;
    int hyp_pts = 0, minus_ok = 0, plus_ok = 0, corrected_pts = 0;
    std::string worst_model;
    for (const auto& spec : validation_zoo_submersions()) {
        built_model bm = build_model(spec);
        auto pts = sample_points(bm.domain_chart(), 100, kSeed + 2, bm.constants);
        std::vector<point_record> recs(pts.size());
        std::vector<double> tgap(pts.size()), vkap(pts.size()), cgap(pts.size());
        parallel_for(static_cast<int>(pts.size()), [&](int i) {
            submersion_jets s(bm.as_submersion(), pts[i], bm.constants);
            tension_result tg = tension(s.mj());
            tension_result tr = tension_reduced(s);
            tgap[i] = normalized_diff(s.mj(), tg.tau, tr.tau);
            vkap[i] = s.vertical_kappa();
            bitension_result bg = bitension(s.mj());
            reduced_bitension rb = bitension_reduced(s);
            recs[i].match_minus = normalized_diff(s.mj(), rb.minus, bg.tau2);
            recs[i].match_plus = normalized_diff(s.mj(), rb.plus, bg.tau2);
            cgap[i] = normalized_diff(s.mj(), rb.minus + rb.vertical_correction, bg.tau2);
        });
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (tgap[i] > worst_tension) {
                worst_tension = tgap[i];
                worst_model = spec.id;
            }
            if (vkap[i] <= 1e-8) {
                ++hyp_pts;
                if (*recs[i].match_minus <= 1e-6) ++minus_ok;
                if (*recs[i].match_plus <= 1e-6) ++plus_ok;
                worst_minus = std::max(worst_minus, *recs[i].match_minus);
            } else {
                ++corrected_pts;
                worst_corrected = std::max(worst_corrected, cgap[i]);
            }
        }
    }
    bool tension_ok = worst_tension <= 1e-8;
    bool sign_ok = minus_ok == hyp_pts && plus_ok < hyp_pts && worst_corrected <= 1e-6;
    std::ostringstream d;
    d << "tension gap <= 1e-8 (worst " << worst_tension << " on " << worst_model
      << "); resolved variant: minus (Eq with -grad_X X), matched " << minus_ok << "/" << hyp_pts
      << " fiber-invariant points (plus: " << plus_ok << "); " << corrected_pts
      << " flag l>=2 points satisfy the vertical-corrected identity (worst " << worst_corrected
      << ")";
    report_line(5, "reduced formulas vs oracle", tension_ok && sign_ok, d.str());
}

void curvature_term_criterion() {
    double worst = 0.0;
    for (const char* id : {"hopf", "berger"}) {
        built_model bm = build_model({id, {}, {}});
        auto pts = sample_points(bm.domain_chart(), 50, kSeed + 3, bm.constants);
        std::vector<double> gaps(pts.size());
        parallel_for(static_cast<int>(pts.size()), [&](int i) {
            submersion_jets s(bm.as_submersion(), pts[i], bm.constants);
            tension_result t = tension(s.mj());
            const jet& x0 = s.mj().dom().x()[0];
            jet_vec generic = (1.0 + x0 * x0) * s.eps()[0] + cos(x0) * s.eps()[1];
            double g = 0.0;
            for (const jet_vec& V : {t.tau, s.eps()[0], generic}) {
                jet_vec cv = curvature_term(s.mj(), V);
                jet_vec ric(s.n(), jet::constant(s.mj().mdim(), 0.0));
                for (int a = 0; a < s.n(); ++a)
                    for (int b = 0; b < s.n(); ++b)
                        ric[a] = ric[a] + s.mj().ricN_endo(a, b) * V[b];
                g = std::max(g, normalized_diff(s.mj(), cv, ric));
            }
            gaps[i] = g;
        });
        for (double g : gaps) worst = std::max(worst, g);
    }
    std::ostringstream d;
    d << "sum R^h(V, dpi e_i) dpi e_i vs Ric^h(V), worst " << worst << " (<= 1e-7)";
    report_line(6, "curvature term contraction", worst <= 1e-7, d.str());
}

void cp1_criterion() {
    built_model cp1 = build_model({"cp1_round", {}, {}});
    const metric_field& h = cp1.as_map().g;
    std::vector<std::string> none;
    scalar_expr f = parse_expr("cos(theta)", h.ch.coords, none);
    auto pts = sample_points(h.ch, 100, kSeed + 4, cp1.constants);
    double worst_ric = 0.0, worst_eig = 0.0;
    for (const auto& p : pts) {
        metric_jets m(h, p, cp1.constants);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                worst_ric = std::max(
                    std::abs(m.ricci(i, j).value() - 0.5 * m.G().at(i, j).value()), worst_ric);
        jet lf = laplacian(m, f, cp1.constants);
        double fv = eval_value(f, p, cp1.constants);
        worst_eig = std::max(worst_eig, std::abs(lf.value() - fv));
    }
    std::ostringstream d;
    d << "|Ric - g/2| worst " << worst_ric << ", |lap f - f| worst " << worst_eig
      << " (both <= 1e-8) at 100 points";
    report_line(7, "CP^1 constants c=1/2, lambda1=1", worst_ric <= 1e-8 && worst_eig <= 1e-8,
                d.str());
}

void flag_criterion() {
    double worst_div = 0.0, worst_identity = 0.0;
    double max_r1 = 0.0, max_r2 = 0.0, max_base = 0.0;
    for (double l : {2.0, 3.0}) {
        built_model fl = build_model({"flag_local", {{"l", l}}, {}});
        auto pts = sample_points(fl.domain_chart(), 100, kSeed + 5, fl.constants);
        std::vector<double> dv(pts.size()), idg(pts.size()), r1(pts.size()), r2(pts.size()),
            br(pts.size());
        parallel_for(static_cast<int>(pts.size()), [&](int i) {
            submersion_jets s(fl.as_submersion(), pts[i], fl.constants);
            divergence_parts d = divergence_tension(s);
            dv[i] = std::abs(d.div_x);
            idg[i] = std::abs(d.div_x - d.sum_ei_kappa - d.correction);
            einstein_residuals_result er =
                einstein_residuals(s, einstein_data{0.5, 1.0}, /*strict=*/false);
            r1[i] = er.r1;
            r2[i] = er.r2;
            br[i] = er.base_residual;
        });
        for (std::size_t i = 0; i < pts.size(); ++i) {
            worst_div = std::max(worst_div, dv[i]);
            worst_identity = std::max(worst_identity, idg[i]);
            max_r1 = std::max(max_r1, r1[i]);
            max_r2 = std::max(max_r2, r2[i]);
            max_base = std::max(max_base, br[i]);
        }
    }
    std::ostringstream d;
    d << "div X worst " << worst_div << ", decomposition gap " << worst_identity
      << " (both <= 1e-9); reported Eq(5.3) residuals with c=1/2: max r1 " << max_r1 << ", max r2 "
      << max_r2 << ", base Einstein residual " << max_base << " (report-only)";
    report_line(8, "flag model divergence l=2,3", worst_div <= 1e-9 && worst_identity <= 1e-9,
                d.str());
}

void suites_criterion() {
    auto suites = self_validate(kSeed + 6);
    bool pass = all_pass(suites);
    std::ostringstream d;
    int failed = 0;
    for (const auto& s : suites)
        if (!s.pass) ++failed;
    d << suites.size() << " suites";
    if (failed) d << ", " << failed << " FAILED:";
    for (const auto& s : suites)
        if (!s.pass) d << " " << s.name;
    report_line(9, "property suites (release gate)", pass, d.str());
    for (const auto& s : suites)
        std::printf("       - %-32s %s  worst %.3e  %s\n", s.name.c_str(),
                    s.pass ? "pass" : "FAIL", s.worst, s.detail.c_str());
}

void determinism_criterion() {
    std::string cfg_text = R"([model]
zoo = "loubeau_ou"
[run]
points = 25
seed = 4242
[output]
timestamp = false
)";
    run_config cfg = config_from_toml(cfg_text);
    run_report a = run_check(cfg);
    run_report b = run_check(cfg);
    std::string ja = report_to_json(a), jb = report_to_json(b);
    bool pass = ja == jb && report_to_csv(a) == report_to_csv(b);
    std::ostringstream d;
    d << "two runs, " << ja.size() << " JSON bytes, byte-identical: " << (pass ? "yes" : "NO");
    report_line(10, "determinism", pass, d.str());
}

} // namespace

int main() {
    std::printf("sublab acceptance suite\n");
    inversion_criteria();
    loubeau_ou_criterion();
    hopf_criterion();
    reduced_formula_criterion();
    curvature_term_criterion();
    cp1_criterion();
    flag_criterion();
    suites_criterion();
    determinism_criterion();
    if (g_failures) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all criteria PASS\n");
    return 0;
}
