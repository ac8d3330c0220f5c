#pragma once

#include <optional>

#include "sublab/geometry.hpp"

namespace sublab {

// A smooth map phi:(M,g) -> (N,h) between charts, components given as
// expressions over the domain coordinates.
struct smooth_map {
    metric_field g; // domain metric, chart inside
    metric_field h; // codomain metric, chart inside
    std::vector<scalar_expr> comps;

    const chart& dom() const { return g.ch; }
    const chart& cod() const { return h.ch; }
    static smooth_map identity(const metric_field& m);
    void validate() const;
};

// Everything derived from a map at one domain point. A section of the
// pullback bundle is represented by its codomain-basis components as jets
// over the domain variables: evaluated at the canonical lift they carry the
// whole local field, so differentiating a derived field (tau feeding the
// rough Laplacian) is a coefficient shift, never finite differencing.
class map_jets {
public:
    map_jets(const smooth_map& m, std::span<const double> p, const const_map& consts);

    const smooth_map& map() const { return *map_; }
    const const_map& consts() const { return *consts_; }
    int mdim() const { return dom_.dim(); }
    int ndim() const { return cod_.dim(); }
    const metric_jets& dom() const { return dom_; }
    const metric_jets& cod() const { return cod_; }
    const jet_vec& phi() const { return phi_; }
    const jet_mat& dphi() const { return dphi_; } // (a,i) = d_i phi^a
    const jet& d2phi(int a, int i, int j) const { return d2phi_[(a * mdim() + i) * mdim() + j]; }

    // codomain-side quantities pulled to the domain (composed with phi)
    const jet& gammaN(int a, int b, int c) const { return gammaN_[(a * ndim() + b) * ndim() + c]; }
    const jet_mat& h_at() const { return h_at_; }
    const jet& riemannN(int l, int i, int j, int k) const;
    const jet& ricN_endo(int i, int j) const;

    const std::vector<double>& pt() const { return p_; }
    // g-orthonormal frame at the point, cached
    const std::vector<jet_vec>& frame() const;

private:
    void need_curvature() const;

    const smooth_map* map_;
    const const_map* consts_;
    std::vector<double> p_;
    metric_jets dom_;
    jet_vec phi_;
    metric_jets cod_;
    jet_mat dphi_;
    std::vector<jet> d2phi_;
    std::vector<jet> gammaN_;
    jet_mat h_at_;
    mutable std::vector<jet> riemannN_, ricN_endo_;
    mutable std::optional<std::vector<jet_vec>> frame_;
};

// |V|_h at phi(p) (order-0 part).
double h_norm(const map_jets& m, const jet_vec& V);

int differential_rank(const map_jets& m, double tol = 1e-9);

// B(phi)(X,Y) in codomain coordinates; tensorial, symmetric in (X,Y).
jet_vec second_fundamental_form(const map_jets& m, const jet_vec& X, const jet_vec& Y);

struct tension_result {
    jet_vec tau;  // valid through order 2
    double scale; // sum of |B(e_r,e_r)|_h, for normalized residuals
};
// Trace of B over a g-orthonormal frame (basis independence is a tested
// property, not an assumption).
tension_result tension(const map_jets& m);
tension_result tension(const map_jets& m, const std::vector<jet_vec>& frame);

// (nabla^pi_dir V)^a = dir^i d_i V^a + Gamma^N(phi)^a_{bc} (dphi dir)^b V^c.
jet_vec pullback_connection(const map_jets& m, const jet_vec& V, const jet_vec& dir);

struct laplacian_result {
    jet_vec total;                   // rough Laplacian, nonnegative convention
    std::vector<jet_vec> per_frame;  // -(nabla_e_r nabla_e_r - nabla_{nabla_e_r e_r}) V
};
laplacian_result rough_laplacian(const map_jets& m, const jet_vec& V,
                                 const std::vector<jet_vec>& frame);
laplacian_result rough_laplacian(const map_jets& m, const jet_vec& V);

// R(V) = sum_r R^N(V, dphi e_r) dphi e_r.
jet_vec curvature_term(const map_jets& m, const jet_vec& V, const std::vector<jet_vec>& frame);
jet_vec curvature_term(const map_jets& m, const jet_vec& V);

jet_vec jacobi(const map_jets& m, const jet_vec& V);

struct bitension_result {
    jet_vec tau2;
    jet_vec rough;  // laplacian part applied to tau
    jet_vec curv;   // curvature part applied to tau
    double scale;   // |rough| + |curv|
};
bitension_result bitension(const map_jets& m);

struct energy_result {
    double density;   // e(phi) = |dphi|^2 / 2
    double tau_norm2; // |tau|^2
};
energy_result energy_densities(const map_jets& m);

// residual / (1 + scale): scale-free residuals near singular loci
double normalized(double residual, double scale);
// |a-b| normalized by both magnitudes
double normalized_diff(const map_jets& m, const jet_vec& a, const jet_vec& b);

} // namespace sublab
