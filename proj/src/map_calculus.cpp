#include "sublab/map_calculus.hpp"

#include <cmath>

namespace sublab {

smooth_map smooth_map::identity(const metric_field& m) {
    smooth_map id;
    id.g = m;
    id.h = m;
    std::vector<std::string> none;
    for (const auto& c : m.ch.coords) id.comps.push_back(parse_expr(c, m.ch.coords, none));
    return id;
}

void smooth_map::validate() const {
    g.ch.validate();
    h.ch.validate();
    if (static_cast<int>(comps.size()) != h.ch.dim())
        throw build_error("map component count does not match codomain dimension");
}

map_jets::map_jets(const smooth_map& m, std::span<const double> p, const const_map& consts)
    : map_(&m), consts_(&consts), p_(p.begin(), p.end()),
      dom_(m.g, p, consts),
      phi_([&] {
          jet_vec v;
          v.reserve(m.comps.size());
          for (const auto& c : m.comps) v.push_back(eval_jet(c, dom_.x(), consts));
          return v;
      }()),
      cod_(m.h, values(phi_), consts) {
    const int md = mdim(), nd = ndim();
    dphi_ = jet_mat(nd, md, md);
    for (int a = 0; a < nd; ++a)
        for (int i = 0; i < md; ++i) dphi_.at(a, i) = derivative(phi_[a], i);
    d2phi_.assign(nd * md * md, jet::constant(md, 0.0));
    for (int a = 0; a < nd; ++a)
        for (int i = 0; i < md; ++i)
            for (int j = i; j < md; ++j) {
                jet d = derivative(dphi_.at(a, i), j);
                d2phi_[(a * md + i) * md + j] = d;
                d2phi_[(a * md + j) * md + i] = d;
            }
    gammaN_.assign(nd * nd * nd, jet::constant(md, 0.0));
    for (int a = 0; a < nd; ++a)
        for (int b = 0; b < nd; ++b)
            for (int c = b; c < nd; ++c) {
                jet g = compose(cod_.gamma(a, b, c), phi_);
                gammaN_[(a * nd + b) * nd + c] = g;
                gammaN_[(a * nd + c) * nd + b] = g;
            }
    h_at_ = jet_mat(nd, nd, md);
    for (int a = 0; a < nd; ++a)
        for (int b = 0; b < nd; ++b) h_at_.at(a, b) = compose(cod_.G().at(a, b), phi_);
}

void map_jets::need_curvature() const {
    if (!riemannN_.empty()) return;
    const int nd = ndim();
    riemannN_.reserve(nd * nd * nd * nd);
    for (int l = 0; l < nd; ++l)
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j)
                for (int k = 0; k < nd; ++k)
                    riemannN_.push_back(compose(cod_.riemann(l, i, j, k), phi_));
    ricN_endo_.reserve(nd * nd);
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) ricN_endo_.push_back(compose(cod_.ricci_endo(i, j), phi_));
}

const jet& map_jets::riemannN(int l, int i, int j, int k) const {
    need_curvature();
    const int nd = ndim();
    return riemannN_[((l * nd + i) * nd + j) * nd + k];
}

const jet& map_jets::ricN_endo(int i, int j) const {
    need_curvature();
    return ricN_endo_[i * ndim() + j];
}

const std::vector<jet_vec>& map_jets::frame() const {
    if (!frame_) frame_ = gram_schmidt_frame(dom_);
    return *frame_;
}

double h_norm(const map_jets& m, const jet_vec& V) {
    return std::sqrt(std::abs(metric_dot(m.h_at(), V, V).value()));
}

int differential_rank(const map_jets& m, double tol) {
    const int rows = m.ndim(), cols = m.mdim();
    std::vector<double> a(rows * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) a[r * cols + c] = m.dphi().at(r, c).value();
    int rank = 0;
    std::vector<bool> used(rows, false);
    for (int c = 0; c < cols; ++c) {
        int piv = -1;
        double best = tol;
        for (int r = 0; r < rows; ++r)
            if (!used[r] && std::abs(a[r * cols + c]) > best) {
                best = std::abs(a[r * cols + c]);
                piv = r;
            }
        if (piv < 0) continue;
        used[piv] = true;
        ++rank;
        for (int r = 0; r < rows; ++r) {
            if (r == piv) continue;
            double f = a[r * cols + c] / a[piv * cols + c];
            for (int k = 0; k < cols; ++k) a[r * cols + k] -= f * a[piv * cols + k];
        }
    }
    return rank;
}

jet_vec second_fundamental_form(const map_jets& m, const jet_vec& X, const jet_vec& Y) {
    const int md = m.mdim(), nd = m.ndim();
    jet_vec B;
    B.reserve(nd);
    for (int a = 0; a < nd; ++a) {
        jet s = jet::constant(md, 0.0);
        for (int i = 0; i < md; ++i)
            for (int j = 0; j < md; ++j) {
                jet t = m.d2phi(a, i, j);
                for (int b = 0; b < nd; ++b)
                    for (int c = 0; c < nd; ++c)
                        t = t + m.gammaN(a, b, c) * m.dphi().at(b, i) * m.dphi().at(c, j);
                for (int k = 0; k < md; ++k) t = t - m.dphi().at(a, k) * m.dom().gamma(k, i, j);
                s = s + X[i] * Y[j] * t;
            }
        B.push_back(s);
    }
    return B;
}

tension_result tension(const map_jets& m) { return tension(m, m.frame()); }

tension_result tension(const map_jets& m, const std::vector<jet_vec>& frame) {
    const int nd = m.ndim();
    tension_result r;
    r.tau.assign(nd, jet::constant(m.mdim(), 0.0));
    r.scale = 0.0;
    for (const auto& e : frame) {
        jet_vec b = second_fundamental_form(m, e, e);
        r.scale += h_norm(m, b);
        r.tau = r.tau + b;
    }
    return r;
}

jet_vec pullback_connection(const map_jets& m, const jet_vec& V, const jet_vec& dir) {
    const int md = m.mdim(), nd = m.ndim();
    jet_vec r;
    r.reserve(nd);
    for (int a = 0; a < nd; ++a) {
        jet s = jet::constant(md, 0.0);
        for (int i = 0; i < md; ++i) s = s + dir[i] * derivative(V[a], i);
        for (int b = 0; b < nd; ++b) {
            jet db = jet::constant(md, 0.0);
            for (int i = 0; i < md; ++i) db = db + m.dphi().at(b, i) * dir[i];
            for (int c = 0; c < nd; ++c) s = s + m.gammaN(a, b, c) * db * V[c];
        }
        r.push_back(s);
    }
    return r;
}

laplacian_result rough_laplacian(const map_jets& m, const jet_vec& V,
                                 const std::vector<jet_vec>& frame) {
    const int nd = m.ndim();
    laplacian_result r;
    r.total.assign(nd, jet::constant(m.mdim(), 0.0));
    for (const auto& e : frame) {
        jet_vec w = pullback_connection(m, V, e);
        jet_vec a = pullback_connection(m, w, e);
        jet_vec c = covariant_derivative(m.dom(), e, e);
        jet_vec b = pullback_connection(m, V, c);
        jet_vec contrib = -1.0 * (a - b);
        r.total = r.total + contrib;
        r.per_frame.push_back(std::move(contrib));
    }
    return r;
}

laplacian_result rough_laplacian(const map_jets& m, const jet_vec& V) {
    return rough_laplacian(m, V, m.frame());
}

jet_vec curvature_term(const map_jets& m, const jet_vec& V, const std::vector<jet_vec>& frame) {
    const int md = m.mdim(), nd = m.ndim();
    jet_vec r(nd, jet::constant(md, 0.0));
    for (const auto& e : frame) {
        jet_vec de(nd, jet::constant(md, 0.0));
        for (int b = 0; b < nd; ++b)
            for (int i = 0; i < md; ++i) de[b] = de[b] + m.dphi().at(b, i) * e[i];
        for (int l = 0; l < nd; ++l) {
            jet s = jet::constant(md, 0.0);
            for (int i = 0; i < nd; ++i)
                for (int j = 0; j < nd; ++j)
                    for (int k = 0; k < nd; ++k)
                        s = s + m.riemannN(l, i, j, k) * V[i] * de[j] * de[k];
            r[l] = r[l] + s;
        }
    }
    return r;
}

jet_vec curvature_term(const map_jets& m, const jet_vec& V) {
    return curvature_term(m, V, m.frame());
}

jet_vec jacobi(const map_jets& m, const jet_vec& V) {
    return rough_laplacian(m, V).total - curvature_term(m, V);
}

bitension_result bitension(const map_jets& m) {
    tension_result t = tension(m);
    bitension_result r;
    r.rough = rough_laplacian(m, t.tau).total;
    r.curv = curvature_term(m, t.tau);
    r.tau2 = r.rough - r.curv;
    r.scale = h_norm(m, r.rough) + h_norm(m, r.curv);
    return r;
}

energy_result energy_densities(const map_jets& m) {
    const int md = m.mdim(), nd = m.ndim();
    double e = 0.0;
    for (int i = 0; i < md; ++i)
        for (int j = 0; j < md; ++j) {
            double gij = m.dom().Ginv().at(i, j).value();
            for (int a = 0; a < nd; ++a)
                for (int b = 0; b < nd; ++b)
                    e += 0.5 * gij * m.h_at().at(a, b).value() * m.dphi().at(a, i).value() *
                         m.dphi().at(b, j).value();
        }
    tension_result t = tension(m);
    double tn = h_norm(m, t.tau);
    return {e, tn * tn};
}

double normalized(double residual, double scale) { return residual / (1.0 + scale); }

double normalized_diff(const map_jets& m, const jet_vec& a, const jet_vec& b) {
    return normalized(h_norm(m, a - b), h_norm(m, a) + h_norm(m, b));
}

} // namespace sublab
