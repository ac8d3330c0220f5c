#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sublab/expr.hpp"

namespace sublab {

using point = std::vector<double>;

// A coordinate chart: named coordinates, a finite box, and optional
// exclusion expressions (a point is in the domain iff every constraint
// evaluates > 0 there).
struct chart {
    std::vector<std::string> coords;
    std::vector<std::pair<double, double>> box;
    std::vector<scalar_expr> keep_positive;

    int dim() const { return static_cast<int>(coords.size()); }
    void validate() const;
    bool contains(std::span<const double> p, const const_map& consts) const;
};

// Symmetric matrix of scalar expressions over a chart (g_ab).
struct metric_field {
    chart ch;
    std::vector<scalar_expr> entries; // dim*dim, row-major, symmetric

    const scalar_expr& at(int i, int j) const { return entries[i * ch.dim() + j]; }
    scalar_expr& at(int i, int j) { return entries[i * ch.dim() + j]; }
    static metric_field euclidean(chart c);
    static metric_field diagonal(chart c, std::vector<scalar_expr> diag);
};

struct vector_field {
    chart ch;
    std::vector<scalar_expr> comps; // coordinate-basis components
};

// Deterministic rejection sampler over the chart box. Throws
// sampling_error after 100*n failed attempts.
std::vector<point> sample_points(const chart& ch, int n, std::uint64_t seed,
                                 const const_map& consts);

// Uniform double in [0,1) from the raw generator word; bit-stable across
// platforms, unlike std::uniform_real_distribution.
double u53(std::uint64_t word);

} // namespace sublab
