#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sublab/errors.hpp"

namespace sublab {

// Truncated multivariate Taylor arithmetic: a jet stores the Taylor
// coefficients (partials divided by alpha!) of a scalar quantity at a point,
// up to total order 4. Order 4 is enough for every quantity in this project:
// a bitension field consumes fourth derivatives of map components and third
// derivatives of metric components, nothing deeper.
inline constexpr int kJetOrder = 4;
inline constexpr int kJetMaxDim = 4;
inline constexpr int kJetMaxCoeffs = 70; // C(4+4,4), dim 4

// Per-dimension multi-index tables: graded order, shift and product maps.
class jet_table {
public:
    static const jet_table& get(int dim);

    int dim = 0;
    int count = 0;
    std::vector<std::array<std::uint8_t, kJetMaxDim>> alpha;
    std::vector<std::uint8_t> order_of;
    std::vector<double> factorial;                  // alpha!
    std::vector<std::array<int, kJetMaxDim>> up;    // index of alpha+e_v, -1 past order 4
    std::vector<std::array<int, kJetMaxDim>> down;  // index of alpha-e_v, -1 if alpha_v=0
    struct pair_ij {
        std::uint16_t a, b;
    };
    std::vector<std::vector<pair_ij>> decomp;       // for k: all (i,j) with alpha_i+alpha_j = alpha_k
    std::array<int, kJetOrder + 2> grade_begin{};   // first index of each total order

    int index_of(std::span<const int> a) const;     // -1 if outside the table

private:
    explicit jet_table(int dim);
};

class jet {
public:
    jet() = default;

    static jet constant(int dim, double v);
    // Coordinate seed: value v, unit first derivative in direction var.
    static jet variable(int dim, int var, double v);

    int dim() const { return dim_; }
    // Derivatives of total order <= valid() are exact; higher coefficients are zero.
    int valid() const { return valid_; }
    double value() const { return c_[0]; }

    double coeff(int k) const { return c_[k]; }
    double& coeff(int k) { return c_[k]; }
    double coeff(std::span<const int> alpha) const;
    // The raw partial derivative d^alpha f = alpha! * coeff(alpha).
    double partial(std::span<const int> alpha) const;

    const jet_table& table() const { return jet_table::get(dim_); }

    jet& clamp_valid(int v);

    friend jet operator-(const jet& a);
    friend jet operator+(const jet& a, const jet& b);
    friend jet operator-(const jet& a, const jet& b);
    friend jet operator*(const jet& a, const jet& b);
    friend jet operator/(const jet& a, const jet& b);
    friend jet operator+(const jet& a, double s);
    friend jet operator+(double s, const jet& a);
    friend jet operator-(const jet& a, double s);
    friend jet operator-(double s, const jet& a);
    friend jet operator*(const jet& a, double s);
    friend jet operator*(double s, const jet& a);
    friend jet operator/(const jet& a, double s);
    friend jet operator/(double s, const jet& a);
    jet& operator+=(const jet& b) { return *this = *this + b; }
    jet& operator-=(const jet& b) { return *this = *this - b; }
    jet& operator*=(const jet& b) { return *this = *this * b; }

    friend jet exp(const jet& a);
    friend jet log(const jet& a);
    friend jet sin(const jet& a);
    friend jet cos(const jet& a);
    friend jet sqrt(const jet& a);
    friend jet pow(const jet& a, double e);   // requires positive value
    friend jet pow_int(const jet& a, long n); // repeated multiplication, exact

    // d/dx_var as a jet one order shorter.
    friend jet derivative(const jet& f, int var);

    // Substitute args into f (truncated Taylor composition). args[v].value()
    // must equal the expansion point of f in its v-th variable.
    friend jet compose(const jet& f, std::span<const jet> args);

private:
    jet(int dim, int valid) : dim_(dim), valid_(valid) { c_.fill(0.0); }
    // Chain rule through a univariate function given its derivatives at value().
    static jet univariate(const jet& a, std::span<const double> dcoef);

    std::int32_t dim_ = 1;
    std::int32_t valid_ = kJetOrder;
    std::array<double, kJetMaxCoeffs> c_{};
};

using jet_vec = std::vector<jet>;

struct jet_mat {
    int rows = 0;
    int cols = 0;
    std::vector<jet> a;

    jet_mat() = default;
    jet_mat(int r, int c, int dim)
        : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, jet::constant(dim, 0.0)) {}
    jet& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    const jet& at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

// One jet per coordinate; active coordinates get a unit first-order seed.
jet_vec lift_point(std::span<const double> coords, std::span<const int> active);
jet_vec lift_point(std::span<const double> coords); // all active

// Solve A x = b over the jet ring, Gaussian elimination with partial
// pivoting on order-0 magnitudes. Throws degenerate_metric_error if the
// order-0 part is singular.
jet_vec jet_solve(const jet_mat& A, std::span<const jet> b);
jet_mat jet_solve(const jet_mat& A, const jet_mat& B);
jet_mat jet_inverse(const jet_mat& A);

jet dot(std::span<const jet> x, std::span<const jet> y);
jet_vec mat_vec(const jet_mat& A, std::span<const jet> x);
// x^T G y
jet metric_dot(const jet_mat& G, std::span<const jet> x, std::span<const jet> y);

jet_vec operator+(const jet_vec& x, const jet_vec& y);
jet_vec operator-(const jet_vec& x, const jet_vec& y);
jet_vec operator*(const jet& s, const jet_vec& x);
jet_vec operator*(double s, const jet_vec& x);
jet_vec derivative(const jet_vec& x, int var);
jet_vec compose(std::span<const jet> f, std::span<const jet> args);

// Euclidean norm of the order-0 part.
double value_norm(std::span<const jet> x);
std::vector<double> values(std::span<const jet> x);

} // namespace sublab
