#pragma once

#include <cstdint>
#include <optional>

#include "sublab/map_calculus.hpp"

namespace sublab {

// pi:(P,g) -> (M,h) with 1-dimensional fibers: dim P = dim M + 1. Higher
// fiber dimensions are rejected at construction.
struct riemannian_submersion {
    smooth_map pi; // pi.g is the total metric, pi.h the base metric
    void validate() const;
};

struct einstein_data {
    double c = 0.0;       // Ric = c Id
    double lambda1 = 0.0; // first nonzero Laplace eigenvalue
};

// Adapted frame and structure coefficients at one point, everything jets
// over the total-space variables so brackets and second derivatives of the
// kappa_i remain available.
class submersion_jets {
public:
    submersion_jets(const riemannian_submersion& s, std::span<const double> p,
                    const const_map& consts);

    const map_jets& mj() const { return mj_; }
    int n() const { return mj_.ndim(); } // base dimension

    const jet_vec& vertical() const { return vertical_; }                 // e_{n+1}
    const std::vector<jet_vec>& horizontal() const { return horizontal_; } // e_1..e_n
    // epsilon_i pulled back: base-coordinate components as jets over P
    const std::vector<jet_vec>& eps() const { return eps_; }

    const jet& kappa(int i) const { return kappa_[i]; }
    const jet& D_coef(int k, int i, int j) const { return D_[(k * n() + i) * n() + j]; }

    // norm of the horizontal part left in [e_i, e_{n+1}] after removing
    // kappa_i e_{n+1}; the paper's Eq for kappa presumes this vanishes
    double horizontal_remainder(int i) const { return hor_rem_[i]; }
    // max_i |e_{n+1} kappa_i|: the reduced bitension formula drops the
    // vertical Hessian of kappa, which is legitimate exactly when this is 0
    double vertical_kappa() const;

    double isometry_residual() const;      // |h(dpi e_i, dpi e_j) - delta_ij|
    double orthonormality_residual() const;

    // X = sum_i kappa_i eps_i = -tau(pi), as a pullback section
    const jet_vec& X() const { return X_; }
    // horizontal lift sum_i kappa_i e_i
    const jet_vec& X_lift() const { return Xlift_; }

private:
    map_jets mj_;
    jet_vec vertical_;
    std::vector<jet_vec> horizontal_;
    std::vector<jet_vec> base_frame_; // over base variables
    std::vector<jet_vec> eps_;
    std::vector<jet> kappa_;
    std::vector<jet> D_;
    std::vector<double> hor_rem_;
    jet_vec X_, Xlift_;
};

struct split_result {
    jet_vec vertical_basis;              // single field, k=1
    std::vector<jet_vec> horizontal_basis;
    jet_mat projector_v, projector_h;    // order-0-usable projection matrices
};
split_result split_spaces(const submersion_jets& s);

// tau(pi) = -sum_i kappa_i eps_i; must agree with the definitional tension.
tension_result tension_reduced(const submersion_jets& s);

struct reduced_bitension {
    jet_vec plus;                 // -lap_h X + grad_X X + Ric X  (as printed in the theorem)
    jet_vec minus;                // -lap_h X - grad_X X + Ric X  (as printed in the derivation)
    jet_vec vertical_correction;  // nabla_{e_{n+1}} nabla_{e_{n+1}} X, dropped by the reduction
    double scale;
};
reduced_bitension bitension_reduced(const submersion_jets& s);

struct divergence_parts {
    double div_x;       // sum_i h(eps_i, nabla_{e_i} X)
    double sum_ei_kappa;
    double correction;  // -h(sum_i dpi(nabla_{e_i} e_i), X); div_x = sum + correction
};
divergence_parts divergence_tension(const submersion_jets& s);

struct einstein_residuals_result {
    double base_residual; // |Ric_endo - c Id|_F at pi(p)
    double r1;            // normalized |lap_h X - c X|
    double r2;            // normalized |grad_X X|
};
// strict: throw build_error when the base fails the Einstein check (>1e-8).
einstein_residuals_result einstein_residuals(const submersion_jets& s, const einstein_data& data,
                                             bool strict = true);

struct obata_residuals_result {
    double base_residual;
    double eigres; // |lap f - 2c f|
    double jres;   // |rough X - 2 Ric X|, X = grad f
    double r1;     // |rough X - c X|
    double r2;     // |nabla_X X|
};
obata_residuals_result obata_residual(const metric_field& h, const einstein_data& data,
                                      const scalar_expr& f, std::span<const double> p,
                                      const const_map& consts);

// rough Laplacian of a vector field on a single manifold (identity-map
// calculus); used by the Bochner and Obata checks
jet_vec rough_laplacian_field(const metric_field& h, const vector_field& X,
                              std::span<const double> p, const const_map& consts);

enum class verdict { harmonic, proper_biharmonic, neither };
std::string to_string(verdict v);

struct classify_config {
    int points = 100;
    std::uint64_t seed = 20250801;
    double tol_h = 1e-7; // on normalized residuals; true zeros sit near 1e-10
    double tol_b = 1e-7;
    std::optional<einstein_data> einstein;
};

struct point_record {
    point coords;
    double tau = 0.0;  // normalized |tau|
    double tau2 = 0.0; // normalized |tau2| (definitional)
    // submersion-only fields
    std::optional<double> tau2_red_plus, tau2_red_minus;
    std::optional<double> match_plus, match_minus; // normalized reduced-vs-definitional gap
    std::optional<double> div_x;
    std::optional<double> r1, r2, base_einstein;
    std::optional<double> vertical_kappa, isometry, hor_remainder;
};

struct classification_report {
    classify_config cfg;
    bool is_submersion = false;
    std::vector<point_record> records;
    verdict result = verdict::neither;
    double max_tau = 0.0, min_tau = 0.0, max_tau2 = 0.0;
    int sign_plus_matched = 0, sign_minus_matched = 0; // within tol at a point
    std::string sign_resolution;                       // "minus", "plus", "both", "none"
};

classification_report classify(const smooth_map& m, const classify_config& cfg,
                               const const_map& consts);
classification_report classify(const riemannian_submersion& s, const classify_config& cfg,
                               const const_map& consts);

point_record analyze_point(const smooth_map& m, std::span<const double> p,
                           const const_map& consts);
point_record analyze_point(const riemannian_submersion& s, std::span<const double> p,
                           const const_map& consts, const std::optional<einstein_data>& ed);

} // namespace sublab
