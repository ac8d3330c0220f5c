#include "sublab/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>

namespace sublab {

namespace {

struct token {
    enum kind { number, ident, op, end } k;
    std::string text;
    double num = 0.0;
    std::size_t pos = 0, len = 0;
};

class lexer {
public:
    explicit lexer(const std::string& s) : s_(s) { advance(); }
    const token& peek() const { return cur_; }
    token next() {
        token t = cur_;
        advance();
        return t;
    }

private:
    void advance() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        cur_ = {};
        cur_.pos = i_;
        if (i_ >= s_.size()) {
            cur_.k = token::end;
            cur_.len = 0;
            return;
        }
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t j = i_;
            while (j < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[j])) || s_[j] == '.')) ++j;
            if (j < s_.size() && (s_[j] == 'e' || s_[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
                std::size_t d = k;
                while (d < s_.size() && std::isdigit(static_cast<unsigned char>(s_[d]))) ++d;
                if (d == k) throw parse_error("malformed number", i_, d - i_);
                j = d;
            }
            double v = 0.0;
            auto res = std::from_chars(s_.data() + i_, s_.data() + j, v);
            if (res.ec != std::errc() || res.ptr != s_.data() + j)
                throw parse_error("malformed number '" + s_.substr(i_, j - i_) + "'", i_, j - i_);
            cur_.k = token::number;
            cur_.num = v;
            cur_.text = s_.substr(i_, j - i_);
            cur_.len = j - i_;
            i_ = j;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
                ++j;
            cur_.k = token::ident;
            cur_.text = s_.substr(i_, j - i_);
            cur_.len = j - i_;
            i_ = j;
            return;
        }
        if (std::strchr("+-*/^(),", c)) {
            cur_.k = token::op;
            cur_.text = std::string(1, c);
            cur_.len = 1;
            ++i_;
            return;
        }
        throw parse_error(std::string("unexpected character '") + c + "'", i_, 1);
    }

    const std::string& s_;
    std::size_t i_ = 0;
    token cur_;
};

bool fn_from_name(const std::string& name, expr_fn& fn) {
    if (name == "exp") fn = expr_fn::exp_fn;
    else if (name == "log") fn = expr_fn::log_fn;
    else if (name == "sin") fn = expr_fn::sin_fn;
    else if (name == "cos") fn = expr_fn::cos_fn;
    else if (name == "sqrt") fn = expr_fn::sqrt_fn;
    else return false;
    return true;
}

expr_ptr make_number(double v, std::size_t pos, std::size_t len) {
    auto n = std::make_shared<expr_node>();
    n->kind = expr_kind::number;
    n->num = v;
    n->pos = pos;
    n->len = len;
    return n;
}

bool is_number(const expr_ptr& e, double& v) {
    if (e->kind == expr_kind::number) { v = e->num; return true; }
    return false;
}

// Fold numeric subtrees through the arithmetic operators. Transcendental
// calls stay symbolic.
expr_ptr fold(expr_ptr e) {
    double x, y;
    switch (e->kind) {
    case expr_kind::neg:
        if (is_number(e->a, x)) return make_number(-x, e->pos, e->len);
        break;
    case expr_kind::add:
    case expr_kind::sub:
    case expr_kind::mul:
    case expr_kind::div:
        if (is_number(e->a, x) && is_number(e->b, y)) {
            double r = e->kind == expr_kind::add ? x + y
                     : e->kind == expr_kind::sub ? x - y
                     : e->kind == expr_kind::mul ? x * y
                                                 : x / y;
            if (std::isfinite(r)) return make_number(r, e->pos, e->len);
        }
        break;
    case expr_kind::ipow:
        if (is_number(e->a, x)) {
            double r = std::pow(x, static_cast<double>(e->ipow_exp));
            if (std::isfinite(r)) return make_number(r, e->pos, e->len);
        }
        break;
    default:
        break;
    }
    return e;
}

class parser {
public:
    parser(const std::string& text, std::span<const std::string> coords,
           std::span<const std::string> consts)
        : lex_(text), coords_(coords), consts_(consts) {}

    expr_ptr parse() {
        expr_ptr e = expr();
        const token& t = lex_.peek();
        if (t.k != token::end)
            throw parse_error("unexpected '" + t.text + "'", t.pos, t.len);
        return e;
    }

private:
    expr_ptr expr() {
        expr_ptr lhs = term();
        while (lex_.peek().k == token::op && (lex_.peek().text == "+" || lex_.peek().text == "-")) {
            token op = lex_.next();
            expr_ptr rhs = term();
            auto n = std::make_shared<expr_node>();
            n->kind = op.text == "+" ? expr_kind::add : expr_kind::sub;
            n->a = lhs;
            n->b = rhs;
            n->pos = op.pos;
            n->len = op.len;
            lhs = fold(n);
        }
        return lhs;
    }

    expr_ptr term() {
        expr_ptr lhs = factor();
        while (lex_.peek().k == token::op && (lex_.peek().text == "*" || lex_.peek().text == "/")) {
            token op = lex_.next();
            expr_ptr rhs = factor();
            auto n = std::make_shared<expr_node>();
            n->kind = op.text == "*" ? expr_kind::mul : expr_kind::div;
            n->a = lhs;
            n->b = rhs;
            n->pos = op.pos;
            n->len = op.len;
            lhs = fold(n);
        }
        return lhs;
    }

    expr_ptr factor() {
        if (lex_.peek().k == token::op && lex_.peek().text == "-") {
            token op = lex_.next();
            expr_ptr inner = factor();
            auto n = std::make_shared<expr_node>();
            n->kind = expr_kind::neg;
            n->a = inner;
            n->pos = op.pos;
            n->len = op.len;
            return fold(n);
        }
        return power();
    }

    expr_ptr power() {
        expr_ptr base = atom();
        if (lex_.peek().k == token::op && lex_.peek().text == "^") {
            token op = lex_.next();
            expr_ptr exponent = signed_power();
            double v;
            auto n = std::make_shared<expr_node>();
            n->a = base;
            n->pos = op.pos;
            n->len = op.len;
            if (is_number(exponent, v) && v == std::floor(v) && std::abs(v) <= 64.0) {
                n->kind = expr_kind::ipow;
                n->ipow_exp = static_cast<long>(v);
            } else {
                n->kind = expr_kind::pow;
                n->b = exponent;
            }
            return fold(n);
        }
        return base;
    }

    expr_ptr signed_power() {
        if (lex_.peek().k == token::op && lex_.peek().text == "-") {
            token op = lex_.next();
            expr_ptr inner = signed_power();
            auto n = std::make_shared<expr_node>();
            n->kind = expr_kind::neg;
            n->a = inner;
            n->pos = op.pos;
            n->len = op.len;
            return fold(n);
        }
        return power();
    }

    expr_ptr atom() {
        token t = lex_.next();
        if (t.k == token::number) return make_number(t.num, t.pos, t.len);
        if (t.k == token::ident) {
            if (lex_.peek().k == token::op && lex_.peek().text == "(") {
                expr_fn fn;
                if (!fn_from_name(t.text, fn))
                    throw parse_error("'" + t.text + "' is not a function", t.pos, t.len);
                lex_.next(); // (
                expr_ptr arg = expr();
                const token& after = lex_.peek();
                if (after.k == token::op && after.text == ",")
                    throw parse_error("'" + t.text + "' takes exactly one argument", after.pos,
                                      after.len);
                expect(")");
                auto n = std::make_shared<expr_node>();
                n->kind = expr_kind::call;
                n->fn = fn;
                n->name = t.text;
                n->a = arg;
                n->pos = t.pos;
                n->len = t.len;
                return n;
            }
            for (std::size_t i = 0; i < coords_.size(); ++i)
                if (coords_[i] == t.text) {
                    auto n = std::make_shared<expr_node>();
                    n->kind = expr_kind::coord;
                    n->coord = static_cast<int>(i);
                    n->name = t.text;
                    n->pos = t.pos;
                    n->len = t.len;
                    return n;
                }
            for (const auto& c : consts_)
                if (c == t.text) {
                    auto n = std::make_shared<expr_node>();
                    n->kind = expr_kind::constant;
                    n->name = t.text;
                    n->pos = t.pos;
                    n->len = t.len;
                    return n;
                }
            throw parse_error("unknown identifier '" + t.text + "'", t.pos, t.len);
        }
        if (t.k == token::op && t.text == "(") {
            expr_ptr e = expr();
            expect(")");
            return e;
        }
        if (t.k == token::end) throw parse_error("unexpected end of input", t.pos, 0);
        throw parse_error("unexpected '" + t.text + "'", t.pos, t.len);
    }

    void expect(const std::string& op) {
        const token& t = lex_.peek();
        if (t.k != token::op || t.text != op)
            throw parse_error("expected '" + op + "'", t.pos, t.len);
        lex_.next();
    }

    lexer lex_;
    std::span<const std::string> coords_;
    std::span<const std::string> consts_;
};

int prec_of(const expr_node& n) {
    switch (n.kind) {
    case expr_kind::add:
    case expr_kind::sub: return 1;
    case expr_kind::mul:
    case expr_kind::div: return 2;
    case expr_kind::neg: return 3;
    case expr_kind::pow:
    case expr_kind::ipow: return 4;
    default: return 5;
    }
}

std::string num_str(double v) {
    std::array<char, 40> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void print_node(std::ostringstream& os, const expr_node& n, int parent_prec) {
    int p = prec_of(n);
    bool paren = p < parent_prec;
    // a negative literal needs parens in contexts tighter than unary minus
    if (n.kind == expr_kind::number && n.num < 0.0) paren = parent_prec > 3;
    if (paren) os << "(";
    switch (n.kind) {
    case expr_kind::number: os << num_str(n.num); break;
    case expr_kind::coord:
    case expr_kind::constant: os << n.name; break;
    case expr_kind::neg:
        os << "-";
        print_node(os, *n.a, p);
        break;
    case expr_kind::add:
        print_node(os, *n.a, p);
        os << " + ";
        print_node(os, *n.b, p + 1);
        break;
    case expr_kind::sub:
        print_node(os, *n.a, p);
        os << " - ";
        print_node(os, *n.b, p + 1);
        break;
    case expr_kind::mul:
        print_node(os, *n.a, p);
        os << "*";
        print_node(os, *n.b, p + 1);
        break;
    case expr_kind::div:
        print_node(os, *n.a, p);
        os << "/";
        print_node(os, *n.b, p + 1);
        break;
    case expr_kind::pow:
        print_node(os, *n.a, p + 1);
        os << "^";
        print_node(os, *n.b, p);
        break;
    case expr_kind::ipow:
        print_node(os, *n.a, p + 1);
        os << "^" << n.ipow_exp;
        break;
    case expr_kind::call:
        os << n.name << "(";
        print_node(os, *n.a, 0);
        os << ")";
        break;
    }
    if (paren) os << ")";
}

[[noreturn]] void eval_fail(const expr_node& n, const std::string& what) {
    throw eval_error(what + " (expression offset " + std::to_string(n.pos) + ")");
}

double lookup_const(const expr_node& n, const const_map& consts) {
    auto it = consts.find(n.name);
    if (it == consts.end()) eval_fail(n, "unbound constant '" + n.name + "'");
    return it->second;
}

double eval_node(const expr_node& n, std::span<const double> p, const const_map& consts) {
    switch (n.kind) {
    case expr_kind::number: return n.num;
    case expr_kind::coord: return p[n.coord];
    case expr_kind::constant: return lookup_const(n, consts);
    case expr_kind::neg: return -eval_node(*n.a, p, consts);
    case expr_kind::add: return eval_node(*n.a, p, consts) + eval_node(*n.b, p, consts);
    case expr_kind::sub: return eval_node(*n.a, p, consts) - eval_node(*n.b, p, consts);
    case expr_kind::mul: return eval_node(*n.a, p, consts) * eval_node(*n.b, p, consts);
    case expr_kind::div: {
        double b = eval_node(*n.b, p, consts);
        if (b == 0.0) eval_fail(n, "division by zero");
        return eval_node(*n.a, p, consts) / b;
    }
    case expr_kind::pow: {
        double a = eval_node(*n.a, p, consts);
        double b = eval_node(*n.b, p, consts);
        if (a <= 0.0) eval_fail(n, "pow with non-integer exponent requires positive base");
        return std::pow(a, b);
    }
    case expr_kind::ipow: {
        double a = eval_node(*n.a, p, consts);
        if (a == 0.0 && n.ipow_exp < 0) eval_fail(n, "zero base with negative exponent");
        double r = 1.0, base = a;
        long m = n.ipow_exp < 0 ? -n.ipow_exp : n.ipow_exp;
        while (m) {
            if (m & 1) r *= base;
            m >>= 1;
            if (m) base *= base;
        }
        return n.ipow_exp < 0 ? 1.0 / r : r;
    }
    case expr_kind::call: {
        double a = eval_node(*n.a, p, consts);
        switch (n.fn) {
        case expr_fn::exp_fn: return std::exp(a);
        case expr_fn::log_fn:
            if (a <= 0.0) eval_fail(n, "log of nonpositive value");
            return std::log(a);
        case expr_fn::sin_fn: return std::sin(a);
        case expr_fn::cos_fn: return std::cos(a);
        case expr_fn::sqrt_fn:
            if (a <= 0.0) eval_fail(n, "sqrt of nonpositive value");
            return std::sqrt(a);
        }
        break;
    }
    }
    eval_fail(n, "corrupt expression node");
}

jet eval_node_jet(const expr_node& n, std::span<const jet> p, const const_map& consts) {
    int dim = p[0].dim();
    switch (n.kind) {
    case expr_kind::number: return jet::constant(dim, n.num);
    case expr_kind::coord: return p[n.coord];
    case expr_kind::constant: return jet::constant(dim, lookup_const(n, consts));
    case expr_kind::neg: return -eval_node_jet(*n.a, p, consts);
    case expr_kind::add: return eval_node_jet(*n.a, p, consts) + eval_node_jet(*n.b, p, consts);
    case expr_kind::sub: return eval_node_jet(*n.a, p, consts) - eval_node_jet(*n.b, p, consts);
    case expr_kind::mul: return eval_node_jet(*n.a, p, consts) * eval_node_jet(*n.b, p, consts);
    case expr_kind::div: {
        jet b = eval_node_jet(*n.b, p, consts);
        if (b.value() == 0.0) eval_fail(n, "division by zero");
        return eval_node_jet(*n.a, p, consts) / b;
    }
    case expr_kind::pow: {
        jet a = eval_node_jet(*n.a, p, consts);
        jet b = eval_node_jet(*n.b, p, consts);
        if (a.value() <= 0.0) eval_fail(n, "pow with non-integer exponent requires positive base");
        return exp(b * log(a));
    }
    case expr_kind::ipow: {
        jet a = eval_node_jet(*n.a, p, consts);
        if (a.value() == 0.0 && n.ipow_exp < 0) eval_fail(n, "zero base with negative exponent");
        return pow_int(a, n.ipow_exp);
    }
    case expr_kind::call: {
        jet a = eval_node_jet(*n.a, p, consts);
        switch (n.fn) {
        case expr_fn::exp_fn: return exp(a);
        case expr_fn::log_fn:
            if (a.value() <= 0.0) eval_fail(n, "log of nonpositive value");
            return log(a);
        case expr_fn::sin_fn: return sin(a);
        case expr_fn::cos_fn: return cos(a);
        case expr_fn::sqrt_fn:
            if (a.value() <= 0.0) eval_fail(n, "sqrt of nonpositive value");
            return sqrt(a);
        }
        break;
    }
    }
    eval_fail(n, "corrupt expression node");
}

} // namespace

std::string scalar_expr::str() const {
    if (!root_) return "";
    std::ostringstream os;
    print_node(os, *root_, 0);
    return os.str();
}

scalar_expr parse_expr(const std::string& text, std::span<const std::string> coords,
                       std::span<const std::string> const_names) {
    parser p(text, coords, const_names);
    return scalar_expr(p.parse());
}

scalar_expr parse_expr(const std::string& text, std::span<const std::string> coords,
                       const const_map& consts) {
    std::vector<std::string> names;
    names.reserve(consts.size());
    for (const auto& [k, v] : consts) names.push_back(k);
    return parse_expr(text, coords, names);
}

double eval_value(const scalar_expr& e, std::span<const double> p, const const_map& consts) {
    return eval_node(*e.root(), p, consts);
}

jet eval_jet(const scalar_expr& e, std::span<const jet> p, const const_map& consts) {
    return eval_node_jet(*e.root(), p, consts);
}

double fd_default_step(int order) {
    // Order 2 upward the steps grow so the stencil stays above roundoff;
    // one Richardson level then removes the leading h^2 truncation term.
    switch (order) {
    case 1: return 1e-5;
    case 2: return 2e-4;
    case 3: return 2e-3;
    default: return 2e-2;
    }
}

namespace {

struct stencil_node {
    int offset;
    double w;
};

std::vector<stencil_node> stencil_1d(int order) {
    switch (order) {
    case 0: return {{0, 1.0}};
    case 1: return {{-1, -0.5}, {1, 0.5}};
    case 2: return {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
    case 3: return {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
    case 4: return {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}};
    default: throw eval_error("fd stencil order beyond 4");
    }
}

double fd_once(const scalar_expr& e, std::span<const double> p, std::span<const int> mi,
               const const_map& consts, double h) {
    const int dim = static_cast<int>(p.size());
    std::vector<std::vector<stencil_node>> st;
    double scale = 1.0;
    int total = 0;
    for (int v = 0; v < dim; ++v) {
        st.push_back(stencil_1d(mi[v]));
        for (int k = 0; k < mi[v]; ++k) scale *= h;
        total += mi[v];
    }
    (void)total;
    std::vector<double> q(p.begin(), p.end());
    double acc = 0.0;
    auto walk = [&](auto&& self, int v, double w) -> void {
        if (v == dim) {
            acc += w * eval_value(e, q, consts);
            return;
        }
        for (const auto& node : st[v]) {
            q[v] = p[v] + node.offset * h;
            self(self, v + 1, w * node.w);
        }
        q[v] = p[v];
    };
    walk(walk, 0, 1.0);
    return acc / scale;
}

} // namespace

double fd_check(const scalar_expr& e, std::span<const double> p, std::span<const int> multi_index,
                const const_map& consts, double step) {
    int order = 0;
    for (int k : multi_index) order += k;
    if (order == 0) return eval_value(e, p, consts);
    double h = step > 0.0 ? step : fd_default_step(order);
    double d1 = fd_once(e, p, multi_index, consts, h);
    double d2 = fd_once(e, p, multi_index, consts, h / 2.0);
    return (4.0 * d2 - d1) / 3.0;
}

} // namespace sublab
