#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sublab/jet.hpp"

namespace sublab {

using const_map = std::map<std::string, double>;

enum class expr_kind { number, coord, constant, neg, add, sub, mul, div, pow, ipow, call };
enum class expr_fn { exp_fn, log_fn, sin_fn, cos_fn, sqrt_fn };

struct expr_node;
using expr_ptr = std::shared_ptr<const expr_node>;

struct expr_node {
    expr_kind kind{};
    double num = 0.0;       // number
    int coord = -1;         // coord index into the chart
    std::string name;       // coord / constant name
    expr_fn fn{};           // call
    long ipow_exp = 0;      // ipow
    expr_ptr a, b;
    std::size_t pos = 0, len = 0; // span into the source text
};

// Immutable scalar expression over named chart coordinates and named
// constants. Constants are bound at evaluation time so parameter sweeps do
// not re-parse.
class scalar_expr {
public:
    scalar_expr() = default;
    explicit scalar_expr(expr_ptr root) : root_(std::move(root)) {}

    bool empty() const { return root_ == nullptr; }
    const expr_ptr& root() const { return root_; }
    std::string str() const;

private:
    expr_ptr root_;
};

// Grammar: + - * / ^ with standard precedence (pow > unary minus > mul/div
// > add/sub, pow right-associative), parentheses, calls f(e) with
// f in {exp, log, sin, cos, sqrt}. Unknown identifiers are rejected.
scalar_expr parse_expr(const std::string& text, std::span<const std::string> coords,
                       std::span<const std::string> const_names);
scalar_expr parse_expr(const std::string& text, std::span<const std::string> coords,
                       const const_map& consts);

double eval_value(const scalar_expr& e, std::span<const double> p, const const_map& consts);
jet eval_jet(const scalar_expr& e, std::span<const jet> p, const const_map& consts);

// Independent derivative oracle: central differences, tensor-product
// stencils, one Richardson extrapolation level. Steps tuned per total
// order so the estimate stays above double-precision roundoff.
double fd_default_step(int order);
double fd_check(const scalar_expr& e, std::span<const double> p, std::span<const int> multi_index,
                const const_map& consts, double step = 0.0);

} // namespace sublab
