#include "sublab/submersion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "sublab/parallel.hpp"

namespace sublab {

void parallel_for(int n, const std::function<void(int)>& fn) {
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SUBLAB_THREADS")) {
        int t = std::atoi(env);
        if (t > 0) threads = t;
    }
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += threads) {
                if (failed.load(std::memory_order_relaxed)) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

void riemannian_submersion::validate() const {
    pi.validate();
    if (pi.dom().dim() != pi.cod().dim() + 1)
        throw build_error("submersion engine handles 1-dimensional fibers only: dim P must be "
                          "dim M + 1, got " +
                          std::to_string(pi.dom().dim()) + " over " +
                          std::to_string(pi.cod().dim()));
}

namespace {

// order-0 kernel direction of the n x m differential: the column left
// without a pivot after row elimination, deterministic
int free_column(const jet_mat& dphi) {
    const int rows = dphi.rows, cols = dphi.cols;
    std::vector<double> a(rows * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) a[r * cols + c] = dphi.at(r, c).value();
    std::vector<bool> col_used(cols, false);
    for (int r = 0; r < rows; ++r) {
        int piv = -1;
        double best = 0.0;
        for (int c = 0; c < cols; ++c)
            if (!col_used[c] && std::abs(a[r * cols + c]) > best) {
                best = std::abs(a[r * cols + c]);
                piv = c;
            }
        if (piv < 0) continue;
        col_used[piv] = true;
        for (int rr = r + 1; rr < rows; ++rr) {
            double f = a[rr * cols + piv] / a[r * cols + piv];
            for (int c = 0; c < cols; ++c) a[rr * cols + c] -= f * a[r * cols + c];
        }
    }
    for (int c = cols - 1; c >= 0; --c)
        if (!col_used[c]) return c;
    return cols - 1;
}

} // namespace

submersion_jets::submersion_jets(const riemannian_submersion& s, std::span<const double> p,
                                 const const_map& consts)
    : mj_(s.pi, p, consts) {
    const int nb = mj_.ndim(), m = mj_.mdim();
    if (differential_rank(mj_) != nb)
        throw eval_error("differential is rank deficient", p);

    // vertical direction: ker dpi, fixed by a unit augmenting row, then
    // g-normalized
    int fc = free_column(mj_.dphi());
    jet_mat M(m, m, m);
    jet_vec rhs(m, jet::constant(m, 0.0));
    for (int r = 0; r < nb; ++r)
        for (int c = 0; c < m; ++c) M.at(r, c) = mj_.dphi().at(r, c);
    for (int c = 0; c < m; ++c)
        M.at(nb, c) = jet::constant(m, c == fc ? 1.0 : 0.0);
    rhs[nb] = jet::constant(m, 1.0);
    jet_vec v = jet_solve(M, rhs);
    jet vn = sqrt(metric_dot(mj_.dom().G(), v, v));
    vertical_.reserve(m);
    for (const auto& c : v) vertical_.push_back(c / vn);

    // base orthonormal frame, pulled back through pi
    base_frame_ = gram_schmidt_frame(mj_.cod());
    eps_.reserve(nb);
    for (const auto& bf : base_frame_) eps_.push_back(compose(bf, mj_.phi()));

    // horizontal lifts: dpi(e_i) = eps_i and g(e_i, e_{n+1}) = 0
    jet_vec gv = mat_vec(mj_.dom().G(), vertical_);
    jet_mat L(m, m, m);
    for (int r = 0; r < nb; ++r)
        for (int c = 0; c < m; ++c) L.at(r, c) = mj_.dphi().at(r, c);
    for (int c = 0; c < m; ++c) L.at(nb, c) = gv[c];
    horizontal_.reserve(nb);
    for (int i = 0; i < nb; ++i) {
        jet_vec b(m, jet::constant(m, 0.0));
        for (int r = 0; r < nb; ++r) b[r] = eps_[i][r];
        horizontal_.push_back(jet_solve(L, b));
    }

    // kappa_i = g([e_i, e_{n+1}], e_{n+1}) and the horizontal leftover
    kappa_.reserve(nb);
    hor_rem_.reserve(nb);
    for (int i = 0; i < nb; ++i) {
        jet_vec br = lie_bracket(horizontal_[i], vertical_);
        jet k = metric_dot(mj_.dom().G(), br, vertical_);
        jet_vec rem = br - k * vertical_;
        hor_rem_.push_back(std::sqrt(std::abs(metric_dot(mj_.dom().G(), rem, rem).value())));
        kappa_.push_back(std::move(k));
    }

    // D^k_{ij} = g([e_i, e_j], e_k), k over horizontal then vertical
    D_.reserve((nb + 1) * nb * nb);
    for (int k = 0; k <= nb; ++k) {
        const jet_vec& ek = k < nb ? horizontal_[k] : vertical_;
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j)
                D_.push_back(metric_dot(mj_.dom().G(), lie_bracket(horizontal_[i], horizontal_[j]), ek));
    }

    X_.assign(nb, jet::constant(m, 0.0));
    Xlift_.assign(m, jet::constant(m, 0.0));
    for (int i = 0; i < nb; ++i) {
        X_ = X_ + kappa_[i] * eps_[i];
        Xlift_ = Xlift_ + kappa_[i] * horizontal_[i];
    }
}

double submersion_jets::vertical_kappa() const {
    const int m = mj_.mdim();
    double worst = 0.0;
    for (const auto& k : kappa_) {
        double d = 0.0;
        for (int j = 0; j < m; ++j) d += vertical_[j].value() * derivative(k, j).value();
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

double submersion_jets::isometry_residual() const {
    const int nb = n();
    double worst = 0.0;
    for (int i = 0; i < nb; ++i) {
        jet_vec di = mat_vec(mj_.dphi(), horizontal_[i]);
        for (int j = 0; j < nb; ++j) {
            jet_vec dj = mat_vec(mj_.dphi(), horizontal_[j]);
            double v = metric_dot(mj_.h_at(), di, dj).value() - (i == j ? 1.0 : 0.0);
            worst = std::max(worst, std::abs(v));
        }
    }
    return worst;
}

double submersion_jets::orthonormality_residual() const {
    const int nb = n();
    double worst = 0.0;
    auto at = [&](int a) -> const jet_vec& { return a < nb ? horizontal_[a] : vertical_; };
    for (int a = 0; a <= nb; ++a)
        for (int b = 0; b <= nb; ++b) {
            double v = metric_dot(mj_.dom().G(), at(a), at(b)).value() - (a == b ? 1.0 : 0.0);
            worst = std::max(worst, std::abs(v));
        }
    return worst;
}

split_result split_spaces(const submersion_jets& s) {
    const int m = s.mj().mdim();
    split_result r;
    r.vertical_basis = s.vertical();
    r.horizontal_basis = s.horizontal();
    r.projector_v = jet_mat(m, m, m);
    r.projector_h = jet_mat(m, m, m);
    jet_vec gv = mat_vec(s.mj().dom().G(), s.vertical());
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
            r.projector_v.at(k, l) = s.vertical()[k] * gv[l];
            jet id = jet::constant(m, k == l ? 1.0 : 0.0);
            r.projector_h.at(k, l) = id - r.projector_v.at(k, l);
        }
    return r;
}

tension_result tension_reduced(const submersion_jets& s) {
    tension_result r;
    r.tau = -1.0 * s.X();
    r.scale = 0.0;
    for (int i = 0; i < s.n(); ++i) r.scale += std::abs(s.kappa(i).value());
    return r;
}

reduced_bitension bitension_reduced(const submersion_jets& s) {
    const map_jets& m = s.mj();
    const int nb = s.n();
    laplacian_result laph = rough_laplacian(m, s.X(), s.horizontal());
    jet_vec grad_xx = pullback_connection(m, s.X(), s.X_lift());
    jet_vec ric_x(nb, jet::constant(m.mdim(), 0.0));
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) ric_x[i] = ric_x[i] + m.ricN_endo(i, j) * s.X()[j];

    reduced_bitension r;
    r.plus = -1.0 * laph.total + grad_xx + ric_x;
    r.minus = -1.0 * laph.total - grad_xx + ric_x;
    jet_vec w = pullback_connection(m, s.X(), s.vertical());
    r.vertical_correction = pullback_connection(m, w, s.vertical());
    r.scale = h_norm(m, laph.total) + h_norm(m, grad_xx) + h_norm(m, ric_x);
    return r;
}

divergence_parts divergence_tension(const submersion_jets& s) {
    const map_jets& m = s.mj();
    const int nb = s.n(), md = m.mdim();
    divergence_parts r{0.0, 0.0, 0.0};
    jet_vec corr_vec(nb, jet::constant(md, 0.0));
    for (int i = 0; i < nb; ++i) {
        jet_vec nx = pullback_connection(m, s.X(), s.horizontal()[i]);
        r.div_x += metric_dot(m.h_at(), s.eps()[i], nx).value();
        for (int j = 0; j < md; ++j)
            r.sum_ei_kappa += s.horizontal()[i][j].value() * derivative(s.kappa(i), j).value();
        corr_vec = corr_vec + mat_vec(m.dphi(), covariant_derivative(m.dom(), s.horizontal()[i],
                                                                     s.horizontal()[i]));
    }
    r.correction = -metric_dot(m.h_at(), corr_vec, s.X()).value();
    return r;
}

namespace {

double base_einstein_residual(const map_jets& m, double c) {
    const int nb = m.ndim();
    double fro = 0.0;
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) {
            double v = m.ricN_endo(i, j).value() - (i == j ? c : 0.0);
            fro += v * v;
        }
    return std::sqrt(fro);
}

} // namespace

einstein_residuals_result einstein_residuals(const submersion_jets& s, const einstein_data& data,
                                             bool strict) {
    const map_jets& m = s.mj();
    einstein_residuals_result r{};
    r.base_residual = base_einstein_residual(m, data.c);
    if (strict && r.base_residual > 1e-8)
        throw build_error("base manifold fails the Einstein check: |Ric - c Id| = " +
                          std::to_string(r.base_residual) + " at " + format_point(m.pt()));
    laplacian_result laph = rough_laplacian(m, s.X(), s.horizontal());
    jet_vec cx = data.c * s.X();
    r.r1 = normalized(h_norm(m, laph.total - cx), h_norm(m, laph.total) + h_norm(m, cx));
    jet_vec grad_xx = pullback_connection(m, s.X(), s.X_lift());
    double scale = 0.0;
    for (int i = 0; i < s.n(); ++i)
        scale += h_norm(m, s.kappa(i) * pullback_connection(m, s.X(), s.horizontal()[i]));
    r.r2 = normalized(h_norm(m, grad_xx), scale);
    return r;
}

jet_vec rough_laplacian_field(const metric_field& h, const vector_field& X,
                              std::span<const double> p, const const_map& consts) {
    smooth_map id = smooth_map::identity(h);
    map_jets m(id, p, consts);
    return rough_laplacian(m, eval_field(X, m.dom().x(), consts)).total;
}

obata_residuals_result obata_residual(const metric_field& h, const einstein_data& data,
                                      const scalar_expr& f, std::span<const double> p,
                                      const const_map& consts) {
    smooth_map id = smooth_map::identity(h);
    map_jets m(id, p, consts);
    obata_residuals_result r{};
    r.base_residual = base_einstein_residual(m, data.c);

    jet fj = eval_jet(f, m.dom().x(), consts);
    jet lapf = laplacian(m.dom(), fj);
    double two_cf = 2.0 * data.c * fj.value();
    r.eigres = normalized(std::abs(lapf.value() - two_cf), std::abs(lapf.value()) + std::abs(two_cf));

    jet_vec X = gradient(m.dom(), fj);
    jet_vec rough = rough_laplacian(m, X).total;
    const int nb = m.ndim();
    jet_vec ric_x(nb, jet::constant(nb, 0.0));
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) ric_x[i] = ric_x[i] + m.ricN_endo(i, j) * X[j];
    jet_vec two_ric = 2.0 * ric_x;
    r.jres = normalized(h_norm(m, rough - two_ric), h_norm(m, rough) + h_norm(m, two_ric));
    jet_vec cx = data.c * X;
    r.r1 = normalized(h_norm(m, rough - cx), h_norm(m, rough) + h_norm(m, cx));
    jet_vec nxx = covariant_derivative(m.dom(), X, X);
    r.r2 = normalized(h_norm(m, nxx), h_norm(m, X) * h_norm(m, X));
    return r;
}

std::string to_string(verdict v) {
    switch (v) {
    case verdict::harmonic: return "HARMONIC";
    case verdict::proper_biharmonic: return "PROPER_BIHARMONIC";
    case verdict::neither: return "NEITHER";
    }
    return "NEITHER";
}

point_record analyze_point(const smooth_map& m, std::span<const double> p,
                           const const_map& consts) {
    map_jets mj(m, p, consts);
    point_record r;
    r.coords.assign(p.begin(), p.end());
    tension_result t = tension(mj);
    r.tau = normalized(h_norm(mj, t.tau), t.scale);
    bitension_result b = bitension(mj);
    r.tau2 = normalized(h_norm(mj, b.tau2), b.scale);
    return r;
}

// tolerance for tallying which printed sign variant reproduces the
// definitional bitension
constexpr double kSignMatchTol = 1e-6;

point_record analyze_point(const riemannian_submersion& s, std::span<const double> p,
                           const const_map& consts, const std::optional<einstein_data>& ed) {
    submersion_jets sj(s, p, consts);
    const map_jets& mj = sj.mj();
    point_record r;
    r.coords.assign(p.begin(), p.end());

    tension_result t = tension(mj);
    r.tau = normalized(h_norm(mj, t.tau), t.scale);
    bitension_result b = bitension(mj);
    r.tau2 = normalized(h_norm(mj, b.tau2), b.scale);

    reduced_bitension rb = bitension_reduced(sj);
    r.tau2_red_plus = normalized(h_norm(mj, rb.plus), rb.scale);
    r.tau2_red_minus = normalized(h_norm(mj, rb.minus), rb.scale);
    r.match_plus = normalized_diff(mj, rb.plus, b.tau2);
    r.match_minus = normalized_diff(mj, rb.minus, b.tau2);

    divergence_parts dv = divergence_tension(sj);
    r.div_x = dv.div_x;
    r.vertical_kappa = sj.vertical_kappa();
    r.isometry = sj.isometry_residual();
    double rem = 0.0;
    for (int i = 0; i < sj.n(); ++i) rem = std::max(rem, sj.horizontal_remainder(i));
    r.hor_remainder = rem;

    if (ed) {
        einstein_residuals_result er = einstein_residuals(sj, *ed, /*strict=*/false);
        r.base_einstein = er.base_residual;
        r.r1 = er.r1;
        r.r2 = er.r2;
    }
    return r;
}

namespace {

std::vector<point> sample_valid(const chart& ch, int nwant, std::uint64_t seed,
                                const const_map& consts,
                                const std::function<bool(const point&)>& ok) {
    std::mt19937_64 rng(seed);
    std::vector<point> pts;
    pts.reserve(nwant);
    long attempts = 0;
    const long max_attempts = 100L * nwant;
    point p(ch.dim());
    while (static_cast<int>(pts.size()) < nwant) {
        if (++attempts > max_attempts)
            throw sampling_error("found only " + std::to_string(pts.size()) + " of " +
                                 std::to_string(nwant) + " valid sample points in " +
                                 std::to_string(max_attempts) + " attempts");
        for (int i = 0; i < ch.dim(); ++i) {
            const auto& [lo, hi] = ch.box[i];
            p[i] = lo + (hi - lo) * u53(rng());
        }
        if (!ch.contains(p, consts)) continue;
        if (ok && !ok(p)) continue;
        pts.push_back(p);
    }
    return pts;
}

classification_report finish_report(classification_report rep) {
    rep.max_tau = rep.min_tau = rep.max_tau2 = 0.0;
    if (!rep.records.empty()) rep.min_tau = rep.records.front().tau;
    int n_pts = static_cast<int>(rep.records.size());
    int plus_all = 0, minus_all = 0;
    for (const auto& r : rep.records) {
        rep.max_tau = std::max(rep.max_tau, r.tau);
        rep.min_tau = std::min(rep.min_tau, r.tau);
        rep.max_tau2 = std::max(rep.max_tau2, r.tau2);
        if (r.match_plus && *r.match_plus <= kSignMatchTol) ++plus_all;
        if (r.match_minus && *r.match_minus <= kSignMatchTol) ++minus_all;
    }
    rep.sign_plus_matched = plus_all;
    rep.sign_minus_matched = minus_all;
    if (rep.is_submersion && n_pts > 0) {
        bool plus_ok = plus_all == n_pts, minus_ok = minus_all == n_pts;
        rep.sign_resolution = plus_ok && minus_ok ? "both"
                              : minus_ok          ? "minus"
                              : plus_ok           ? "plus"
                                                  : "none";
    } else {
        rep.sign_resolution = "n/a";
    }
    if (rep.max_tau <= rep.cfg.tol_h) rep.result = verdict::harmonic;
    else if (rep.max_tau2 <= rep.cfg.tol_b) rep.result = verdict::proper_biharmonic;
    else rep.result = verdict::neither;
    return rep;
}

} // namespace

classification_report classify(const smooth_map& m, const classify_config& cfg,
                               const const_map& consts) {
    m.validate();
    auto ok = [&](const point& p) {
        try {
            map_jets mj(m, p, consts);
            return true;
        } catch (const eval_error&) {
            return false;
        }
    };
    auto pts = sample_valid(m.dom(), cfg.points, cfg.seed, consts, ok);
    classification_report rep;
    rep.cfg = cfg;
    rep.is_submersion = false;
    rep.records.resize(pts.size());
    parallel_for(static_cast<int>(pts.size()),
                 [&](int i) { rep.records[i] = analyze_point(m, pts[i], consts); });
    return finish_report(std::move(rep));
}

classification_report classify(const riemannian_submersion& s, const classify_config& cfg,
                               const const_map& consts) {
    s.validate();
    auto ok = [&](const point& p) {
        try {
            map_jets mj(s.pi, p, consts);
            return true;
        } catch (const eval_error&) {
            return false;
        }
    };
    auto pts = sample_valid(s.pi.dom(), cfg.points, cfg.seed, consts, ok);
    classification_report rep;
    rep.cfg = cfg;
    rep.is_submersion = true;
    rep.records.resize(pts.size());
    parallel_for(static_cast<int>(pts.size()),
                 [&](int i) { rep.records[i] = analyze_point(s, pts[i], consts, cfg.einstein); });
    return finish_report(std::move(rep));
}

} // namespace sublab
