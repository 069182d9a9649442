#include "fraclab/symbol.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace fraclab {

struct Expr::Node {
    enum Op { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Sin, Cos, Sqrt } op = Num;
    cplx value = 0;
    int var = -1;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodeP = std::shared_ptr<const Expr::Node>;

NodeP leaf(cplx v) {
    auto n = std::make_shared<Expr::Node>();
    n->value = v;
    return n;
}

NodeP unary(Expr::Node::Op op, NodeP a) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    return n;
}

NodeP binary(Expr::Node::Op op, NodeP a, NodeP b) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    Parser(const std::string& s, const std::vector<std::vector<std::string>>& aliases) : s_(s), aliases_(aliases) {}

    NodeP parse() {
        NodeP e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_, 1) + "'");
        return e;
    }

private:
    const std::string& s_;
    const std::vector<std::vector<std::string>>& aliases_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        config_error("expression \"" + s_ + "\" at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(const std::string& tok) {
        skip();
        if (s_.compare(pos_, tok.size(), tok) == 0) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    NodeP expr() {
        NodeP l = term();
        for (;;) {
            if (eat("+"))
                l = binary(Expr::Node::Add, l, term());
            else if (eat("-") || eat("\xE2\x88\x92"))
                l = binary(Expr::Node::Sub, l, term());
            else
                return l;
        }
    }

    NodeP term() {
        NodeP l = signed_factor();
        for (;;) {
            if (eat("*") || eat("\xC3\x97") || eat("\xC2\xB7"))
                l = binary(Expr::Node::Mul, l, signed_factor());
            else if (eat("/") || eat("\xC3\xB7"))
                l = binary(Expr::Node::Div, l, signed_factor());
            else
                return l;
        }
    }

    NodeP signed_factor() {
        if (eat("-") || eat("\xE2\x88\x92")) return unary(Expr::Node::Neg, signed_factor());
        if (eat("+")) return signed_factor();
        NodeP base = primary();
        if (eat("^") || eat("**")) return binary(Expr::Node::Pow, base, signed_factor());
        return base;
    }

    // multi-byte operator glyphs that must end an identifier
    bool at_glyph() const {
        for (const char* g : {"\xC3\x97", "\xC3\xB7", "\xC2\xB7", "\xE2\x88\x92"})
            if (s_.compare(pos_, std::char_traits<char>::length(g), g) == 0) return true;
        return false;
    }

    static bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

    NodeP primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        if (eat("(")) {
            NodeP e = expr();
            if (!eat(")")) fail("missing ')'");
            return e;
        }
        unsigned char c = static_cast<unsigned char>(s_[pos_]);
        if (std::isdigit(c) || c == '.') {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            pos_ += used;
            if (pos_ < s_.size() && s_[pos_] == 'i' && (pos_ + 1 == s_.size() || !ident_char(static_cast<unsigned char>(s_[pos_ + 1])))) {
                ++pos_;
                return leaf(cplx(0, v));
            }
            return leaf(v);
        }
        if (!ident_char(c)) fail("unexpected '" + s_.substr(pos_, 1) + "'");
        std::size_t start = pos_;
        while (pos_ < s_.size() && ident_char(static_cast<unsigned char>(s_[pos_])) && !at_glyph()) ++pos_;
        std::string id = s_.substr(start, pos_ - start);
        static const std::map<std::string, Expr::Node::Op> funcs = {
            {"exp", Expr::Node::Exp}, {"log", Expr::Node::Log}, {"ln", Expr::Node::Log},
            {"sin", Expr::Node::Sin}, {"cos", Expr::Node::Cos}, {"sqrt", Expr::Node::Sqrt}};
        if (auto f = funcs.find(id); f != funcs.end()) {
            if (!eat("(")) fail(id + " needs an argument in parentheses");
            NodeP arg = expr();
            if (!eat(")")) fail("missing ')'");
            return unary(f->second, arg);
        }
        for (std::size_t k = 0; k < aliases_.size(); ++k)
            for (const auto& a : aliases_[k])
                if (a == id) {
                    auto n = std::make_shared<Expr::Node>();
                    n->op = Expr::Node::Var;
                    n->var = int(k);
                    return n;
                }
        if (id == "i") return leaf(cplx(0, 1));
        if (id == "pi") return leaf(M_PI);
        pos_ = start;
        fail("unknown name '" + id + "'");
    }
};

cplx lift(const cplx&, cplx c) { return c; }
Taylor lift(const Taylor& like, cplx c) { return Taylor(like.nvars(), like.order(), c); }

cplx power(const cplx& x, const cplx& y) {
    if (y.imag() == 0 && std::floor(y.real()) == y.real() && std::abs(y.real()) < 64) return ipow(x, int(y.real()));
    return std::pow(x, y);
}
Taylor power(const Taylor& x, const Taylor& y) { return pow(x, y); }

template <class T>
T eval_node(const Expr::Node& n, const std::vector<T>& v, const T& like) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    switch (n.op) {
        case Expr::Node::Num: return lift(like, n.value);
        case Expr::Node::Var: return v[std::size_t(n.var)];
        case Expr::Node::Neg: return -eval_node(*n.a, v, like);
        case Expr::Node::Add: return eval_node(*n.a, v, like) + eval_node(*n.b, v, like);
        case Expr::Node::Sub: return eval_node(*n.a, v, like) - eval_node(*n.b, v, like);
        case Expr::Node::Mul: return eval_node(*n.a, v, like) * eval_node(*n.b, v, like);
        case Expr::Node::Div: return eval_node(*n.a, v, like) / eval_node(*n.b, v, like);
        case Expr::Node::Pow: return power(eval_node(*n.a, v, like), eval_node(*n.b, v, like));
        case Expr::Node::Exp: return exp(eval_node(*n.a, v, like));
        case Expr::Node::Log: return log(eval_node(*n.a, v, like));
        case Expr::Node::Sin: return sin(eval_node(*n.a, v, like));
        case Expr::Node::Cos: return cos(eval_node(*n.a, v, like));
        case Expr::Node::Sqrt: return sqrt(eval_node(*n.a, v, like));
    }
    return lift(like, 0.0);
}

bool node_uses(const Expr::Node& n, int k) {
    if (n.op == Expr::Node::Var) return n.var == k;
    return (n.a && node_uses(*n.a, k)) || (n.b && node_uses(*n.b, k));
}

bool node_real(const Expr::Node& n) {
    if (n.op == Expr::Node::Num) return n.value.imag() == 0;
    return (!n.a || node_real(*n.a)) && (!n.b || node_real(*n.b));
}

}  // namespace

Expr::Expr(const std::string& text, const std::vector<std::vector<std::string>>& aliases) : text_(text) {
    root_ = Parser(text_, aliases).parse();
}

cplx Expr::eval(const std::vector<cplx>& vars) const { return eval_node<cplx>(*root_, vars, cplx(0)); }

Taylor Expr::eval(const std::vector<Taylor>& vars) const {
    if (vars.empty()) config_error("Expr: Taylor evaluation needs at least one variable");
    return eval_node<Taylor>(*root_, vars, vars[0]);
}

bool Expr::uses(int k) const { return node_uses(*root_, k); }
bool Expr::real() const { return node_real(*root_); }

cplx parse_constant(const std::string& text) {
    Expr e(text, {});
    return e.eval(std::vector<cplx>{});
}

double richardson_step(int k) {
    static const double steps[] = {1e-3, 1e-3, 1e-3, 4e-3, 1e-2, 3e-2, 6e-2};
    if (k < 0) return steps[0];
    return k <= 6 ? steps[k] : 6e-2;
}

std::vector<cplx> richardson_derivatives(const std::function<cplx(double)>& f, double lambda, int k) {
    std::vector<cplx> out(static_cast<std::size_t>(k + 1));
    const double scale = lambda > 0 ? lambda : 1.0;
    out[0] = f(lambda);
    for (int j = 1; j <= k; ++j) {
        auto diff = [&](double h) {
            cplx s = 0;
            double binom = 1;
            for (int i = 0; i <= j; ++i) {
                s += ((i % 2) ? -binom : binom) * f(lambda + (0.5 * j - i) * h);
                binom = binom * (j - i) / (i + 1);
            }
            return s / std::pow(h, j);
        };
        double h = scale * richardson_step(j);
        cplx d0 = diff(h), d1 = diff(h / 2), d2 = diff(h / 4);
        cplx r0 = (4.0 * d1 - d0) / 3.0, r1 = (4.0 * d2 - d1) / 3.0;
        out[std::size_t(j)] = (16.0 * r1 - r0) / 15.0;
    }
    return out;
}

std::vector<cplx> Symbol::derivatives(double lambda, int k) const {
    if (jet) {
        Taylor t = jet(Taylor::variable(1, k, 0, lambda));
        std::vector<cplx> out;
        for (int j = 0; j <= k; ++j) out.push_back(t.derivative(j));
        return out;
    }
    return richardson_derivatives(eval, lambda, k);
}

Symbol make_symbol(const std::string& name, double order_exponent, Jet1 jet, bool real) {
    Symbol s;
    s.name = name;
    s.order_exponent = order_exponent;
    s.real = real;
    s.jet = jet;
    s.eval = [jet](double l) { return jet(Taylor(1, 0, l)).value(); };
    return s;
}

Symbol operator*(const Symbol& a, const Symbol& b) {
    Symbol s;
    s.name = a.name + "*" + b.name;
    s.order_exponent = a.order_exponent + b.order_exponent;
    s.rho = std::min(a.rho, b.rho);
    s.real = a.real && b.real;
    s.needs_nonzero = a.needs_nonzero || b.needs_nonzero;
    auto ea = a.eval, eb = b.eval;
    s.eval = [ea, eb](double l) { return ea(l) * eb(l); };
    if (a.jet && b.jet) {
        auto ja = a.jet, jb = b.jet;
        s.jet = [ja, jb](const Taylor& x) { return ja(x) * jb(x); };
    }
    return s;
}

Symbol constant_symbol(cplx c) {
    Symbol s = make_symbol("const:" + fmt(c.real()) + (c.imag() != 0 ? "+" + fmt(c.imag()) + "i" : ""), 0,
                           [c](const Taylor& x) { return Taylor(x.nvars(), x.order(), c); }, c.imag() == 0);
    s.eval = [c](double) { return c; };
    return s;
}

Symbol lambda_symbol() {
    Symbol s = make_symbol("lambda", 1, [](const Taylor& x) { return x; });
    s.eval = [](double l) { return cplx(l); };
    return s;
}

namespace {
std::string cname(cplx s) {
    if (s.imag() == 0) return fmt(s.real());
    if (s.real() == 0) return fmt(s.imag()) + "i";
    return fmt(s.real()) + (s.imag() > 0 ? "+" : "") + fmt(s.imag()) + "i";
}
}  // namespace

Symbol bessel(cplx s) {
    Symbol p = make_symbol("bessel:" + cname(s), -s.real(), [s](const Taylor& x) { return pow(1.0 + x, -s); },
                           s.imag() == 0);
    p.eval = [s](double l) { return s == cplx(0) ? cplx(1) : std::pow(cplx(1.0 + l), -s); };
    return p;
}

Symbol riesz(cplx s) {
    Symbol p = make_symbol("riesz:" + cname(s), -s.real(), [s](const Taylor& x) { return pow(x, -s); },
                           s.imag() == 0);
    p.needs_nonzero = s != cplx(0);
    p.eval = [s](double l) { return s == cplx(0) ? cplx(1) : std::pow(cplx(l), -s); };
    return p;
}

Symbol ratio_symbol() {
    Symbol p = make_symbol("ratio", 0, [](const Taylor& x) { return x / (1.0 + x); });
    p.eval = [](double l) { return cplx(l / (1.0 + l)); };
    return p;
}

Symbol heat_symbol(double t) {
    if (!(t > 0)) config_error("heat: t must be positive");
    Symbol p = make_symbol("heat:" + fmt(t), 0, [t](const Taylor& x) { return exp(x * cplx(-t)); });
    p.eval = [t](double l) { return cplx(std::exp(-t * l)); };
    return p;
}

Symbol imaginary_power(double tau) {
    Symbol p = bessel(cplx(0, -tau));
    p.name = "imaginary-power:" + fmt(tau);
    return p;
}

Symbol parse_symbol(const std::string& spec) {
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon), arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto need_arg = [&]() {
        if (arg.empty()) config_error("symbol '" + head + "' needs a parameter, e.g. " + head + ":1");
        return parse_constant(arg);
    };
    if (head == "bessel") return bessel(need_arg());
    if (head == "riesz") return riesz(need_arg());
    if (head == "heat") return heat_symbol(need_arg().real());
    if (head == "imaginary-power" || head == "ip") return imaginary_power(need_arg().real());
    if (head == "const") return constant_symbol(need_arg());
    if (spec == "ratio") return ratio_symbol();
    if (spec == "lambda" || spec == "laplacian") return lambda_symbol();
    std::string text = head == "expr" ? arg : spec;
    auto e = std::make_shared<Expr>(text, std::vector<std::vector<std::string>>{{"\xCE\xBB", "lambda", "l", "lam"}});
    Symbol p = make_symbol(text, 0, [e](const Taylor& x) { return e->eval(std::vector<Taylor>{x}); }, e->real());
    p.eval = [e](double l) { return e->eval(std::vector<cplx>{cplx(l)}); };
    return p;
}

Taylor Symbol2::expand(double l1, double l2, int k) const {
    if (jet) return jet(Taylor::variable(2, k, 0, l1), Taylor::variable(2, k, 1, l2));
    Taylor t(2, k);
    auto f = eval;
    double fa = 1;
    for (int a = 0; a <= k; ++a) {
        if (a > 0) fa *= a;
        double fb = 1;
        for (int b = 0; a + b <= k; ++b) {
            if (b > 0) fb *= b;
            auto inner = [&](double x1) {
                if (b == 0) return f(x1, l2);
                return richardson_derivatives([&](double x2) { return f(x1, x2); }, l2, b)[std::size_t(b)];
            };
            cplx v = a == 0 ? inner(l1) : richardson_derivatives(inner, l1, a)[std::size_t(a)];
            t.at(a, b) = v / (fa * fb);
        }
    }
    return t;
}

Symbol2 make_symbol2(const std::string& name, double order_exponent, Jet2 jet, bool real) {
    Symbol2 s;
    s.name = name;
    s.order_exponent = order_exponent;
    s.real = real;
    s.jet = jet;
    s.eval = [jet](double a, double b) { return jet(Taylor(2, 0, a), Taylor(2, 0, b)).value(); };
    return s;
}

Symbol2 operator*(const Symbol2& a, const Symbol2& b) {
    Symbol2 s;
    s.name = a.name + "*" + b.name;
    s.order_exponent = a.order_exponent + b.order_exponent;
    s.real = a.real && b.real;
    s.needs_nonzero = a.needs_nonzero || b.needs_nonzero;
    auto ea = a.eval, eb = b.eval;
    s.eval = [ea, eb](double x, double y) { return ea(x, y) * eb(x, y); };
    if (a.jet && b.jet) {
        auto ja = a.jet, jb = b.jet;
        s.jet = [ja, jb](const Taylor& x, const Taylor& y) { return ja(x, y) * jb(x, y); };
    }
    return s;
}

Symbol2 tensor_symbol(const Symbol& f, const Symbol& g) {
    Symbol2 s;
    s.name = "tensor:" + f.name + "|" + g.name;
    s.order_exponent = std::max(f.order_exponent, 0.0) + std::max(g.order_exponent, 0.0);
    s.real = f.real && g.real;
    s.needs_nonzero = f.needs_nonzero || g.needs_nonzero;
    auto ef = f.eval, eg = g.eval;
    s.eval = [ef, eg](double a, double b) { return ef(a) * eg(b); };
    if (f.jet && g.jet) {
        auto jf = f.jet, jg = g.jet;
        s.jet = [jf, jg](const Taylor& x, const Taylor& y) { return jf(x) * jg(y); };
    }
    return s;
}

Symbol2 parse_symbol2(const std::string& spec) {
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon), arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "riesz") {
        if (arg != "1" && arg != "2") config_error("product symbol riesz:i needs i = 1 or 2");
        bool first = arg == "1";
        Symbol2 s = make_symbol2("riesz:" + arg, 0, [first](const Taylor& x, const Taylor& y) {
            return (first ? x : y) / (x + y);
        });
        s.needs_nonzero = true;
        s.eval = [first](double a, double b) { return cplx((first ? a : b) / (a + b)); };
        return s;
    }
    if (spec == "one") {
        Symbol2 s = make_symbol2("one", 0, [](const Taylor& x, const Taylor&) { return Taylor(2, x.order(), 1.0); });
        s.eval = [](double, double) { return cplx(1); };
        return s;
    }
    if (spec == "sum") {
        Symbol2 s = make_symbol2("sum", 1, [](const Taylor& x, const Taylor& y) { return x + y; });
        s.eval = [](double a, double b) { return cplx(a + b); };
        return s;
    }
    if (spec == "elliptic") {
        Symbol2 s = make_symbol2("elliptic", 1, [](const Taylor& x, const Taylor& y) { return 1.0 + x + y; });
        s.eval = [](double a, double b) { return cplx(1 + a + b); };
        return s;
    }
    if (spec == "mixed") {
        Symbol2 s = make_symbol2("mixed", 0, [](const Taylor& x, const Taylor& y) {
            Taylor q = 1.0 + x + y;
            return x * y / (q * q);
        });
        s.eval = [](double a, double b) { return cplx(a * b / ((1 + a + b) * (1 + a + b))); };
        return s;
    }
    if (head == "diff") {
        if (arg.empty()) config_error("diff:a needs the direction a");
        double a = parse_constant(arg).real();
        Symbol2 s = make_symbol2("diff:" + fmt(a), 1, [a](const Taylor& x, const Taylor& y) { return x - y * cplx(a); });
        s.eval = [a](double l1, double l2) { return cplx(l1 - a * l2); };
        return s;
    }
    if (head == "tensor") {
        auto bar = arg.find('|');
        if (bar == std::string::npos) config_error("tensor:A|B needs two factor symbols");
        return tensor_symbol(parse_symbol(arg.substr(0, bar)), parse_symbol(arg.substr(bar + 1)));
    }
    std::string text = head == "expr" ? arg : spec;
    auto e = std::make_shared<Expr>(text, std::vector<std::vector<std::string>>{
                                              {"l1", "lambda1", "\xCE\xBB" "1", "\xCE\xBB\xE2\x82\x81"},
                                              {"l2", "lambda2", "\xCE\xBB" "2", "\xCE\xBB\xE2\x82\x82"}});
    Symbol2 s = make_symbol2(text, 0, [e](const Taylor& x, const Taylor& y) {
        return e->eval(std::vector<Taylor>{x, y});
    }, e->real());
    s.eval = [e](double a, double b) { return e->eval(std::vector<cplx>{cplx(a), cplx(b)}); };
    return s;
}

}  // namespace fraclab
