#include "sublab/chart.hpp"

#include <cmath>
#include <random>

namespace sublab {

void chart::validate() const {
    if (coords.empty()) throw build_error("chart needs at least one coordinate");
    if (dim() > kJetMaxDim)
        throw build_error("chart dimension " + std::to_string(dim()) + " exceeds the jet cap of " +
                          std::to_string(kJetMaxDim));
    if (box.size() != coords.size()) throw build_error("chart box size does not match coordinates");
    for (const auto& [lo, hi] : box) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
            throw build_error("chart box bounds must be finite and nonempty");
    }
}

bool chart::contains(std::span<const double> p, const const_map& consts) const {
    for (int i = 0; i < dim(); ++i)
        if (p[i] < box[i].first || p[i] > box[i].second) return false;
    for (const auto& c : keep_positive) {
        double v;
        try {
            v = eval_value(c, p, consts);
        } catch (const eval_error&) {
            return false;
        }
        if (!(v > 0.0)) return false;
    }
    return true;
}

metric_field metric_field::euclidean(chart c) {
    int d = c.dim();
    metric_field m;
    m.ch = std::move(c);
    m.entries.resize(d * d);
    std::vector<std::string> none;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m.entries[i * d + j] = parse_expr(i == j ? "1" : "0", m.ch.coords, none);
    return m;
}

metric_field metric_field::diagonal(chart c, std::vector<scalar_expr> diag) {
    int d = c.dim();
    metric_field m;
    m.ch = std::move(c);
    m.entries.resize(d * d);
    std::vector<std::string> none;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m.entries[i * d + j] = (i == j) ? diag[i] : parse_expr("0", m.ch.coords, none);
    return m;
}

double u53(std::uint64_t word) { return static_cast<double>(word >> 11) * 0x1.0p-53; }

std::vector<point> sample_points(const chart& ch, int n, std::uint64_t seed,
                                 const const_map& consts) {
    std::mt19937_64 rng(seed);
    std::vector<point> pts;
    pts.reserve(n);
    long attempts = 0;
    const long max_attempts = 100L * n;
    point p(ch.dim());
    while (static_cast<int>(pts.size()) < n) {
        if (++attempts > max_attempts)
            throw sampling_error("found only " + std::to_string(pts.size()) + " of " +
                                 std::to_string(n) + " in-domain points in " +
                                 std::to_string(max_attempts) + " attempts");
        for (int i = 0; i < ch.dim(); ++i) {
            const auto& [lo, hi] = ch.box[i];
            p[i] = lo + (hi - lo) * u53(rng());
        }
        if (ch.contains(p, consts)) pts.push_back(p);
    }
    return pts;
}

} // namespace sublab
