#include "sublab/geometry.hpp"

#include <cmath>

namespace sublab {

void check_positive_definite(const jet_mat& G, std::span<const double> p) {
    constexpr double kPivot = 1e-10;
    const int n = G.rows;
    std::vector<double> a(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i * n + j] = G.at(i, j).value();
    for (int c = 0; c < n; ++c) {
        double d = a[c * n + c];
        if (!(d > kPivot)) throw degenerate_metric_error("metric not positive definite", p);
        double r = std::sqrt(d);
        for (int i = c; i < n; ++i) a[i * n + c] /= r;
        for (int j = c + 1; j < n; ++j)
            for (int i = j; i < n; ++i) a[i * n + j] -= a[i * n + c] * a[j * n + c];
    }
}

metric_jets::metric_jets(const metric_field& g, std::span<const double> p, const const_map& consts)
    : dim_(g.ch.dim()), p_(p.begin(), p.end()) {
    x_ = lift_point(p);
    G_ = jet_mat(dim_, dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) G_.at(i, j) = eval_jet(g.at(i, j), x_, consts);
    check_positive_definite(G_, p);
    Ginv_ = jet_inverse(G_);

    gamma_.assign(dim_ * dim_ * dim_, jet::constant(dim_, 0.0));
    // dG[k][i][j] = d_k g_ij
    std::vector<jet> dG(dim_ * dim_ * dim_, jet::constant(dim_, 0.0));
    for (int k = 0; k < dim_; ++k)
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j) {
                jet d = derivative(G_.at(i, j), k);
                dG[(k * dim_ + i) * dim_ + j] = d;
                dG[(k * dim_ + j) * dim_ + i] = d;
            }
    for (int k = 0; k < dim_; ++k)
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j) {
                jet s = jet::constant(dim_, 0.0);
                for (int l = 0; l < dim_; ++l) {
                    jet t = dG[(i * dim_ + j) * dim_ + l] + dG[(j * dim_ + i) * dim_ + l] -
                            dG[(l * dim_ + i) * dim_ + j];
                    s = s + Ginv_.at(k, l) * t;
                }
                s = s * 0.5;
                gamma_[(k * dim_ + i) * dim_ + j] = s;
                gamma_[(k * dim_ + j) * dim_ + i] = s;
            }
}

void metric_jets::need_curvature() const {
    if (!riemann_.empty()) return;
    const int n = dim_;
    riemann_.assign(n * n * n * n, jet::constant(n, 0.0));
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    jet r = derivative(gamma(l, j, k), i) - derivative(gamma(l, i, k), j);
                    for (int s = 0; s < n; ++s)
                        r = r + gamma(l, i, s) * gamma(s, j, k) - gamma(l, j, s) * gamma(s, i, k);
                    riemann_[((l * n + i) * n + j) * n + k] = r;
                }
    ricci_.assign(n * n, jet::constant(n, 0.0));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            jet s = jet::constant(n, 0.0);
            for (int i = 0; i < n; ++i) s = s + riemann_[((i * n + i) * n + j) * n + k];
            ricci_[j * n + k] = s;
        }
    ricci_endo_.assign(n * n, jet::constant(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            jet s = jet::constant(n, 0.0);
            for (int k = 0; k < n; ++k) s = s + Ginv_.at(i, k) * ricci_[k * n + j];
            ricci_endo_[i * n + j] = s;
        }
}

const jet& metric_jets::riemann(int l, int i, int j, int k) const {
    need_curvature();
    return riemann_[((l * dim_ + i) * dim_ + j) * dim_ + k];
}

const jet& metric_jets::ricci(int i, int j) const {
    need_curvature();
    return ricci_[i * dim_ + j];
}

const jet& metric_jets::ricci_endo(int i, int j) const {
    need_curvature();
    return ricci_endo_[i * dim_ + j];
}

jet_vec eval_field(const vector_field& X, std::span<const jet> x, const const_map& consts) {
    jet_vec v;
    v.reserve(X.comps.size());
    for (const auto& c : X.comps) v.push_back(eval_jet(c, x, consts));
    return v;
}

jet_vec lie_bracket(const jet_vec& X, const jet_vec& Y) {
    const int n = static_cast<int>(X.size());
    jet_vec r;
    r.reserve(n);
    for (int k = 0; k < n; ++k) {
        jet s = X[0] * derivative(Y[k], 0) - Y[0] * derivative(X[k], 0);
        for (int j = 1; j < n; ++j)
            s = s + X[j] * derivative(Y[k], j) - Y[j] * derivative(X[k], j);
        r.push_back(s);
    }
    return r;
}

jet_vec lie_bracket(const metric_jets& m, const vector_field& X, const vector_field& Y,
                    const const_map& consts) {
    return lie_bracket(eval_field(X, m.x(), consts), eval_field(Y, m.x(), consts));
}

jet_vec covariant_derivative(const metric_jets& m, const jet_vec& X, const jet_vec& dir) {
    const int n = m.dim();
    jet_vec r;
    r.reserve(n);
    for (int k = 0; k < n; ++k) {
        jet s = jet::constant(n, 0.0);
        for (int j = 0; j < n; ++j) {
            jet t = derivative(X[k], j);
            for (int l = 0; l < n; ++l) t = t + m.gamma(k, j, l) * X[l];
            s = s + dir[j] * t;
        }
        r.push_back(s);
    }
    return r;
}

jet_vec covariant_derivative(const metric_jets& m, const vector_field& X,
                             std::span<const double> dir, const const_map& consts) {
    jet_vec d;
    d.reserve(dir.size());
    for (double c : dir) d.push_back(jet::constant(m.dim(), c));
    return covariant_derivative(m, eval_field(X, m.x(), consts), d);
}

jet_vec gradient(const metric_jets& m, const jet& f) {
    const int n = m.dim();
    jet_vec r;
    r.reserve(n);
    for (int k = 0; k < n; ++k) {
        jet s = jet::constant(n, 0.0);
        for (int l = 0; l < n; ++l) s = s + m.Ginv().at(k, l) * derivative(f, l);
        r.push_back(s);
    }
    return r;
}

namespace {

jet sqrt_det(const metric_jets& m) {
    // det via jet LU is overkill at dim<=4; expand recursively
    const jet_mat& G = m.G();
    const int n = m.dim();
    auto det = [&](auto&& self, std::vector<int> rows, std::vector<int> cols) -> jet {
        if (rows.size() == 1) return G.at(rows[0], cols[0]);
        jet s = jet::constant(n, 0.0);
        double sign = 1.0;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            std::vector<int> rrows(rows.begin() + 1, rows.end());
            std::vector<int> rcols;
            for (std::size_t k = 0; k < cols.size(); ++k)
                if (k != c) rcols.push_back(cols[k]);
            s = s + sign * (G.at(rows[0], cols[c]) * self(self, rrows, rcols));
            sign = -sign;
        }
        return s;
    };
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    return sqrt(det(det, idx, idx));
}

} // namespace

jet divergence(const metric_jets& m, const jet_vec& X) {
    const int n = m.dim();
    jet sd = sqrt_det(m);
    jet s = jet::constant(n, 0.0);
    for (int i = 0; i < n; ++i) s = s + derivative(sd * X[i], i);
    return s / sd;
}

jet laplacian(const metric_jets& m, const jet& f) { return -divergence(m, gradient(m, f)); }

jet_vec gradient(const metric_jets& m, const scalar_expr& f, const const_map& consts) {
    return gradient(m, eval_jet(f, m.x(), consts));
}

jet divergence(const metric_jets& m, const vector_field& X, const const_map& consts) {
    return divergence(m, eval_field(X, m.x(), consts));
}

jet laplacian(const metric_jets& m, const scalar_expr& f, const const_map& consts) {
    return laplacian(m, eval_jet(f, m.x(), consts));
}

double killing_residual(const metric_jets& m, const jet_vec& X) {
    const int n = m.dim();
    // (L_X g)(d_i, d_j) = g(nabla_i X, d_j) + g(d_i, nabla_j X)
    std::vector<jet_vec> nabla(n);
    for (int i = 0; i < n; ++i) {
        jet_vec dir(n, jet::constant(n, 0.0));
        dir[i] = jet::constant(n, 1.0);
        nabla[i] = covariant_derivative(m, X, dir);
    }
    double fro = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            jet s = jet::constant(n, 0.0);
            for (int k = 0; k < n; ++k)
                s = s + m.G().at(k, j) * nabla[i][k] + m.G().at(i, k) * nabla[j][k];
            fro += s.value() * s.value();
        }
    return std::sqrt(fro);
}

double killing_residual(const metric_jets& m, const vector_field& X, const const_map& consts) {
    return killing_residual(m, eval_field(X, m.x(), consts));
}

std::vector<jet_vec> gram_schmidt_frame(const metric_jets& m) {
    const int n = m.dim();
    std::vector<jet_vec> cand;
    for (int i = 0; i < n; ++i) {
        jet_vec v(n, jet::constant(n, 0.0));
        v[i] = jet::constant(n, 1.0);
        cand.push_back(std::move(v));
    }
    std::vector<jet_vec> frame;
    std::vector<bool> used(n, false);
    for (int step = 0; step < n; ++step) {
        // residuals of the remaining candidates against the frame so far
        int best = -1;
        double best_norm = 0.0;
        std::vector<jet_vec> residuals(n);
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            jet_vec r = cand[i];
            for (const auto& e : frame) {
                jet c = metric_dot(m.G(), r, e);
                r = r - c * e;
            }
            double nr = std::abs(metric_dot(m.G(), r, r).value());
            residuals[i] = std::move(r);
            if (best < 0 || nr > best_norm) {
                best = i;
                best_norm = nr;
            }
        }
        if (best_norm < 1e-20)
            throw degenerate_metric_error("Gram-Schmidt collapsed", m.pt());
        jet_vec u = std::move(residuals[best]);
        jet nn = sqrt(metric_dot(m.G(), u, u));
        for (auto& c : u) c = c / nn;
        frame.push_back(std::move(u));
        used[best] = true;
    }
    return frame;
}

} // namespace sublab
