#include "sublab/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace sublab {

std::string format_point(std::span<const double> p) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) os << ", ";
        os << p[i];
    }
    os << ")";
    return os.str();
}

namespace {

std::uint64_t pack(std::span<const std::uint8_t> a, int dim) {
    std::uint64_t key = 0;
    for (int v = dim - 1; v >= 0; --v) key = key * (kJetOrder + 2) + a[v];
    return key;
}

} // namespace

jet_table::jet_table(int d) : dim(d) {
    // Enumerate multi-indices of total order 0..4, graded, lex within a grade.
    std::map<std::uint64_t, int> lookup;
    std::array<std::uint8_t, kJetMaxDim> cur{};
    for (int ord = 0; ord <= kJetOrder; ++ord) {
        grade_begin[ord] = static_cast<int>(alpha.size());
        // generate all cur with sum == ord
        cur.fill(0);
        auto emit = [&](auto&& self, int var, int rem) -> void {
            if (var == dim - 1) {
                cur[var] = static_cast<std::uint8_t>(rem);
                lookup[pack(cur, dim)] = static_cast<int>(alpha.size());
                alpha.push_back(cur);
                order_of.push_back(static_cast<std::uint8_t>(ord));
                return;
            }
            for (int k = rem; k >= 0; --k) {
                cur[var] = static_cast<std::uint8_t>(k);
                self(self, var + 1, rem - k);
            }
            cur[var] = 0;
        };
        emit(emit, 0, ord);
    }
    count = static_cast<int>(alpha.size());
    grade_begin[kJetOrder + 1] = count;

    factorial.resize(count);
    up.resize(count);
    down.resize(count);
    for (int k = 0; k < count; ++k) {
        double f = 1.0;
        for (int v = 0; v < dim; ++v)
            for (int j = 2; j <= alpha[k][v]; ++j) f *= j;
        factorial[k] = f;
        up[k].fill(-1);
        down[k].fill(-1);
        for (int v = 0; v < dim; ++v) {
            auto b = alpha[k];
            if (order_of[k] < kJetOrder) {
                ++b[v];
                up[k][v] = lookup.at(pack(b, dim));
                --b[v];
            }
            if (b[v] > 0) {
                --b[v];
                down[k][v] = lookup.at(pack(b, dim));
            }
        }
    }

    decomp.resize(count);
    for (int i = 0; i < count; ++i) {
        for (int j = 0; j < count; ++j) {
            if (order_of[i] + order_of[j] > kJetOrder) continue;
            std::array<std::uint8_t, kJetMaxDim> s{};
            for (int v = 0; v < dim; ++v) s[v] = static_cast<std::uint8_t>(alpha[i][v] + alpha[j][v]);
            decomp[lookup.at(pack(s, dim))].push_back(
                {static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j)});
        }
    }
}

const jet_table& jet_table::get(int dim) {
    if (dim < 1 || dim > kJetMaxDim)
        throw jet_order_error("jet dimension " + std::to_string(dim) + " outside supported range 1.." +
                              std::to_string(kJetMaxDim));
    static std::array<const jet_table*, kJetMaxDim + 1> tables{};
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    if (!tables[dim]) tables[dim] = new jet_table(dim);
    return *tables[dim];
}

int jet_table::index_of(std::span<const int> a) const {
    int ord = 0;
    for (int v = 0; v < dim; ++v) ord += a[v];
    if (ord > kJetOrder) return -1;
    for (int k = grade_begin[ord]; k < grade_begin[ord + 1]; ++k) {
        bool match = true;
        for (int v = 0; v < dim; ++v)
            if (alpha[k][v] != a[v]) { match = false; break; }
        if (match) return k;
    }
    return -1;
}

jet jet::constant(int dim, double v) {
    if (!std::isfinite(v)) throw eval_error("non-finite constant in jet arithmetic");
    jet j(dim, kJetOrder);
    j.c_[0] = v;
    return j;
}

jet jet::variable(int dim, int var, double v) {
    if (!std::isfinite(v)) throw eval_error("non-finite coordinate in jet lift");
    jet j(dim, kJetOrder);
    j.c_[0] = v;
    const auto& t = jet_table::get(dim);
    j.c_[t.up[0][var]] = 1.0;
    return j;
}

double jet::coeff(std::span<const int> a) const {
    int k = table().index_of(a);
    if (k < 0) throw jet_order_error("multi-index outside jet order");
    return c_[k];
}

double jet::partial(std::span<const int> a) const {
    int k = table().index_of(a);
    if (k < 0) throw jet_order_error("multi-index outside jet order");
    return c_[k] * table().factorial[k];
}

jet& jet::clamp_valid(int v) {
    valid_ = std::min(valid_, static_cast<std::int32_t>(v));
    const auto& t = table();
    if (valid_ < kJetOrder)
        std::fill(c_.begin() + t.grade_begin[valid_ + 1], c_.begin() + t.count, 0.0);
    return *this;
}

jet operator-(const jet& a) {
    jet r = a;
    for (int k = 0; k < a.table().count; ++k) r.c_[k] = -r.c_[k];
    return r;
}

jet operator+(const jet& a, const jet& b) {
    jet r = a;
    for (int k = 0; k < a.table().count; ++k) r.c_[k] += b.c_[k];
    r.clamp_valid(b.valid_);
    return r;
}

jet operator-(const jet& a, const jet& b) {
    jet r = a;
    for (int k = 0; k < a.table().count; ++k) r.c_[k] -= b.c_[k];
    r.clamp_valid(b.valid_);
    return r;
}

jet operator*(const jet& a, const jet& b) {
    const auto& t = a.table();
    int valid = std::min(a.valid_, b.valid_);
    jet r(a.dim_, valid);
    int top = t.grade_begin[valid + 1];
    for (int k = 0; k < top; ++k) {
        double s = 0.0;
        for (const auto& p : t.decomp[k]) s += a.c_[p.a] * b.c_[p.b];
        r.c_[k] = s;
    }
    return r;
}

jet operator/(const jet& a, const jet& b) {
    if (b.value() == 0.0) throw eval_error("division by a jet with zero value");
    const auto& t = a.table();
    int valid = std::min(a.valid_, b.valid_);
    jet r(a.dim_, valid);
    int top = t.grade_begin[valid + 1];
    for (int k = 0; k < top; ++k) {
        // a_k = sum_{i+j=k} b_i r_j, split off the i=0 term
        double s = a.c_[k];
        for (const auto& p : t.decomp[k])
            if (p.a != 0) s -= b.c_[p.a] * r.c_[p.b];
        r.c_[k] = s / b.c_[0];
    }
    return r;
}

jet operator+(const jet& a, double s) { jet r = a; r.c_[0] += s; return r; }
jet operator+(double s, const jet& a) { return a + s; }
jet operator-(const jet& a, double s) { jet r = a; r.c_[0] -= s; return r; }
jet operator-(double s, const jet& a) { jet r = -a; r.c_[0] += s; return r; }
jet operator*(const jet& a, double s) {
    jet r = a;
    for (int k = 0; k < a.table().count; ++k) r.c_[k] *= s;
    return r;
}
jet operator*(double s, const jet& a) { return a * s; }
jet operator/(const jet& a, double s) {
    if (s == 0.0) throw eval_error("division by zero");
    return a * (1.0 / s);
}
jet operator/(double s, const jet& a) { return jet::constant(a.dim_, s) / a; }

// h = phi(a): write a = a0 + w with w the derivative part, then
// h = sum_k phi^(k)(a0)/k! w^k, exact at order 4 since w has no constant term.
jet jet::univariate(const jet& a, std::span<const double> d) {
    jet w = a;
    w.c_[0] = 0.0;
    jet r = jet::constant(a.dim_, d[0]);
    r.valid_ = a.valid_;
    jet wk = w;
    double kfac = 1.0;
    for (int k = 1; k <= kJetOrder; ++k) {
        kfac *= k;
        jet term = wk * (d[k] / kfac);
        for (int i = 0; i < a.table().count; ++i) r.c_[i] += term.c_[i];
        if (k < kJetOrder) wk = wk * w;
    }
    r.clamp_valid(a.valid_);
    return r;
}

jet exp(const jet& a) {
    double e = std::exp(a.value());
    std::array<double, kJetOrder + 1> d{e, e, e, e, e};
    return jet::univariate(a, d);
}

jet log(const jet& a) {
    double v = a.value();
    if (v <= 0.0) throw eval_error("log of nonpositive value " + std::to_string(v));
    std::array<double, kJetOrder + 1> d{std::log(v), 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v),
                                        -6.0 / (v * v * v * v)};
    return jet::univariate(a, d);
}

jet sin(const jet& a) {
    double s = std::sin(a.value()), c = std::cos(a.value());
    std::array<double, kJetOrder + 1> d{s, c, -s, -c, s};
    return jet::univariate(a, d);
}

jet cos(const jet& a) {
    double s = std::sin(a.value()), c = std::cos(a.value());
    std::array<double, kJetOrder + 1> d{c, -s, -c, s, c};
    return jet::univariate(a, d);
}

jet sqrt(const jet& a) {
    double v = a.value();
    if (v <= 0.0) throw eval_error("sqrt of nonpositive value " + std::to_string(v));
    double r = std::sqrt(v);
    std::array<double, kJetOrder + 1> d{r, 0.5 / r, -0.25 / (r * v), 0.375 / (r * v * v),
                                        -0.9375 / (r * v * v * v)};
    return jet::univariate(a, d);
}

jet pow(const jet& a, double e) {
    double v = a.value();
    if (v <= 0.0) throw eval_error("pow with non-integer exponent requires positive base, got " +
                                   std::to_string(v));
    std::array<double, kJetOrder + 1> d{};
    double fac = 1.0;
    for (int k = 0; k <= kJetOrder; ++k) {
        d[k] = fac * std::pow(v, e - k);
        fac *= (e - k);
    }
    return jet::univariate(a, d);
}

jet pow_int(const jet& a, long n) {
    if (n == 0) return jet::constant(a.dim(), 1.0);
    bool inv = n < 0;
    unsigned long m = inv ? -static_cast<unsigned long>(n) : static_cast<unsigned long>(n);
    jet r = jet::constant(a.dim(), 1.0);
    jet base = a;
    while (m) {
        if (m & 1) r = r * base;
        m >>= 1;
        if (m) base = base * base;
    }
    if (inv) return jet::constant(a.dim(), 1.0) / r;
    return r;
}

jet derivative(const jet& f, int var) {
    if (f.valid_ < 1)
        throw jet_order_error("insufficient jet order: derivative of an order-0 jet");
    const auto& t = f.table();
    jet r(f.dim_, f.valid_ - 1);
    int top = t.grade_begin[f.valid_];
    for (int k = 0; k < top; ++k) {
        int u = t.up[k][var];
        r.c_[k] = f.c_[u] * (t.alpha[k][var] + 1);
    }
    return r;
}

jet compose(const jet& f, std::span<const jet> args) {
    const auto& tf = f.table();
    if (static_cast<int>(args.size()) != tf.dim)
        throw jet_order_error("compose: argument count does not match jet dimension");
    int adim = args[0].dim();
    int valid = f.valid_;
    for (const auto& a : args) valid = std::min(valid, a.valid());

    // monomials w^alpha of the centered arguments, built by graded recursion
    std::vector<jet> w(args.size());
    for (std::size_t v = 0; v < args.size(); ++v) {
        w[v] = args[v];
        w[v].coeff(0) = 0.0;
    }
    std::vector<jet> mono(tf.count, jet::constant(adim, 0.0));
    mono[0] = jet::constant(adim, 1.0);
    jet r = mono[0] * f.coeff(0);
    for (int k = 1; k < tf.count; ++k) {
        int v = 0;
        while (tf.down[k][v] < 0) ++v;
        mono[k] = mono[tf.down[k][v]] * w[v];
        if (f.coeff(k) != 0.0) r = r + mono[k] * f.coeff(k);
    }
    r.clamp_valid(valid);
    return r;
}

jet_vec lift_point(std::span<const double> coords, std::span<const int> active) {
    int dim = static_cast<int>(coords.size());
    for (double c : coords)
        if (!std::isfinite(c)) throw eval_error("non-finite input coordinates", coords);
    std::vector<bool> is_active(dim, false);
    for (int a : active) is_active[a] = true;
    jet_vec out;
    out.reserve(dim);
    for (int i = 0; i < dim; ++i)
        out.push_back(is_active[i] ? jet::variable(dim, i, coords[i]) : jet::constant(dim, coords[i]));
    return out;
}

jet_vec lift_point(std::span<const double> coords) {
    std::vector<int> all(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) all[i] = static_cast<int>(i);
    return lift_point(coords, all);
}

jet_vec jet_solve(const jet_mat& A, std::span<const jet> b) {
    jet_mat B(A.rows, 1, b[0].dim());
    for (int i = 0; i < A.rows; ++i) B.at(i, 0) = b[i];
    jet_mat X = jet_solve(A, B);
    jet_vec x;
    x.reserve(A.rows);
    for (int i = 0; i < A.rows; ++i) x.push_back(X.at(i, 0));
    return x;
}

jet_mat jet_solve(const jet_mat& A, const jet_mat& B) {
    const int n = A.rows;
    jet_mat U = A, X = B;
    constexpr double kPivotTol = 1e-12;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(U.at(col, col).value());
        for (int r = col + 1; r < n; ++r) {
            double m = std::abs(U.at(r, col).value());
            if (m > best) { best = m; piv = r; }
        }
        if (best < kPivotTol)
            throw degenerate_metric_error("singular order-0 matrix in jet solve (pivot " +
                                          std::to_string(best) + ")");
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(U.at(piv, c), U.at(col, c));
            for (int c = 0; c < X.cols; ++c) std::swap(X.at(piv, c), X.at(col, c));
        }
        for (int r = col + 1; r < n; ++r) {
            jet f = U.at(r, col) / U.at(col, col);
            for (int c = col; c < n; ++c) U.at(r, c) = U.at(r, c) - f * U.at(col, c);
            for (int c = 0; c < X.cols; ++c) X.at(r, c) = X.at(r, c) - f * X.at(col, c);
        }
    }
    for (int col = n - 1; col >= 0; --col) {
        for (int c = 0; c < X.cols; ++c) {
            jet s = X.at(col, c);
            for (int k = col + 1; k < n; ++k) s = s - U.at(col, k) * X.at(k, c);
            X.at(col, c) = s / U.at(col, col);
        }
    }
    return X;
}

jet_mat jet_inverse(const jet_mat& A) {
    int dim = A.a[0].dim();
    jet_mat I(A.rows, A.cols, dim);
    for (int i = 0; i < A.rows; ++i) I.at(i, i) = jet::constant(dim, 1.0);
    return jet_solve(A, I);
}

jet dot(std::span<const jet> x, std::span<const jet> y) {
    jet s = x[0] * y[0];
    for (std::size_t i = 1; i < x.size(); ++i) s = s + x[i] * y[i];
    return s;
}

jet_vec mat_vec(const jet_mat& A, std::span<const jet> x) {
    jet_vec r;
    r.reserve(A.rows);
    for (int i = 0; i < A.rows; ++i) {
        jet s = A.at(i, 0) * x[0];
        for (int j = 1; j < A.cols; ++j) s = s + A.at(i, j) * x[j];
        r.push_back(s);
    }
    return r;
}

jet metric_dot(const jet_mat& G, std::span<const jet> x, std::span<const jet> y) {
    return dot(x, mat_vec(G, y));
}

jet_vec operator+(const jet_vec& x, const jet_vec& y) {
    jet_vec r = x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = r[i] + y[i];
    return r;
}

jet_vec operator-(const jet_vec& x, const jet_vec& y) {
    jet_vec r = x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = r[i] - y[i];
    return r;
}

jet_vec operator*(const jet& s, const jet_vec& x) {
    jet_vec r = x;
    for (auto& e : r) e = s * e;
    return r;
}

jet_vec operator*(double s, const jet_vec& x) {
    jet_vec r = x;
    for (auto& e : r) e = e * s;
    return r;
}

jet_vec derivative(const jet_vec& x, int var) {
    jet_vec r;
    r.reserve(x.size());
    for (const auto& e : x) r.push_back(derivative(e, var));
    return r;
}

jet_vec compose(std::span<const jet> f, std::span<const jet> args) {
    jet_vec r;
    r.reserve(f.size());
    for (const auto& e : f) r.push_back(compose(e, args));
    return r;
}

double value_norm(std::span<const jet> x) {
    double s = 0.0;
    for (const auto& e : x) s += e.value() * e.value();
    return std::sqrt(s);
}

std::vector<double> values(std::span<const jet> x) {
    std::vector<double> v;
    v.reserve(x.size());
    for (const auto& e : x) v.push_back(e.value());
    return v;
}

} // namespace sublab
