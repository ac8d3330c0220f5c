#pragma once

#include "sublab/chart.hpp"
#include "sublab/jet.hpp"

namespace sublab {

// Everything the kernel derives from a metric at one chart point, carried as
// jets so further differentiation stays available. Curvature pieces are
// filled on demand.
//
// Sign conventions, fixed project-wide:
//   R(U,V)W = nabla_U nabla_V W - nabla_V nabla_U W - nabla_[U,V] W,
//   Ric(X,Y) = trace of Z -> R(Z,X)Y,
//   Laplacian = delta d (nonnegative spectrum), i.e. lap f = -div grad f.
class metric_jets {
public:
    metric_jets(const metric_field& g, std::span<const double> p, const const_map& consts);

    int dim() const { return dim_; }
    const jet_vec& x() const { return x_; }               // canonical order-4 lift
    const jet_mat& G() const { return G_; }
    const jet_mat& Ginv() const { return Ginv_; }

    // Christoffel symbols Gamma^k_{ij}; symmetric in (i,j) by construction.
    const jet& gamma(int k, int i, int j) const { return gamma_[(k * dim_ + i) * dim_ + j]; }

    // R^l_{ijk} = component of R(d_i, d_j) d_k along d_l.
    const jet& riemann(int l, int i, int j, int k) const;
    const jet& ricci(int i, int j) const;      // covariant Ric_{ij}
    const jet& ricci_endo(int i, int j) const; // Ric^i_j

    const std::vector<double>& pt() const { return p_; }

private:
    void need_curvature() const;

    int dim_;
    std::vector<double> p_;
    jet_vec x_;
    jet_mat G_, Ginv_;
    std::vector<jet> gamma_;
    mutable std::vector<jet> riemann_, ricci_, ricci_endo_;
};

// Order-0 Cholesky positive-definiteness probe; throws
// degenerate_metric_error naming the point when a pivot drops below 1e-10.
void check_positive_definite(const jet_mat& G, std::span<const double> p);

// [X,Y]^k = X^j d_j Y^k - Y^j d_j X^k for component fields given as jets.
jet_vec lie_bracket(const jet_vec& X, const jet_vec& Y);
jet_vec lie_bracket(const metric_jets& m, const vector_field& X, const vector_field& Y,
                    const const_map& consts);

// (nabla_dir X)^k = dir^j (d_j X^k + Gamma^k_{jl} X^l).
jet_vec covariant_derivative(const metric_jets& m, const jet_vec& X, const jet_vec& dir);
jet_vec covariant_derivative(const metric_jets& m, const vector_field& X,
                             std::span<const double> dir, const const_map& consts);

jet_vec gradient(const metric_jets& m, const jet& f);
jet divergence(const metric_jets& m, const jet_vec& X);
jet laplacian(const metric_jets& m, const jet& f); // delta d convention
jet_vec gradient(const metric_jets& m, const scalar_expr& f, const const_map& consts);
jet divergence(const metric_jets& m, const vector_field& X, const const_map& consts);
jet laplacian(const metric_jets& m, const scalar_expr& f, const const_map& consts);

// Frobenius norm of the Lie derivative (L_X g)_{ij} at the point; zero iff
// X is Killing there.
double killing_residual(const metric_jets& m, const jet_vec& X);
double killing_residual(const metric_jets& m, const vector_field& X, const const_map& consts);

// g-orthonormal frame fields from Gram-Schmidt over the coordinate basis,
// greedily pivoted by order-0 norms. Deterministic given the chart.
std::vector<jet_vec> gram_schmidt_frame(const metric_jets& m);

jet_vec eval_field(const vector_field& X, std::span<const jet> x, const const_map& consts);

} // namespace sublab
