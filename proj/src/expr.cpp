#include "rotbonnet/expr.hpp"

#include "rotbonnet/errors.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rotbonnet::expr {

enum class Kind { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Fn { Sin, Cos, Tan, Sinh, Cosh, Exp, Log, Sqrt, Asin, Acos, Atan };

struct Expression::Node {
    Kind kind = Kind::Constant;
    double value = 0.0;
    std::size_t variable = 0;
    Fn fn = Fn::Sin;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

const std::map<std::string, Fn, std::less<>> kFunctions = {
    {"sin", Fn::Sin},   {"cos", Fn::Cos},   {"tan", Fn::Tan},   {"sinh", Fn::Sinh},
    {"cosh", Fn::Cosh}, {"exp", Fn::Exp},   {"log", Fn::Log},   {"sqrt", Fn::Sqrt},
    {"asin", Fn::Asin}, {"acos", Fn::Acos}, {"atan", Fn::Atan},
};

const char* fn_name(Fn fn)
{
    for (const auto& [name, f] : kFunctions)
        if (f == fn) return name.c_str();
    return "?";
}

bool is_const(const NodePtr& n, double v) { return n->kind == Kind::Constant && n->value == v; }

NodePtr make_const(double v)
{
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Constant;
    n->value = v;
    return n;
}

NodePtr make_var(std::size_t i)
{
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Variable;
    n->variable = i;
    return n;
}

double apply(Fn fn, double x)
{
    switch (fn) {
    case Fn::Sin: return std::sin(x);
    case Fn::Cos: return std::cos(x);
    case Fn::Tan: return std::tan(x);
    case Fn::Sinh: return std::sinh(x);
    case Fn::Cosh: return std::cosh(x);
    case Fn::Exp: return std::exp(x);
    case Fn::Log: return std::log(x);
    case Fn::Sqrt: return std::sqrt(x);
    case Fn::Asin: return std::asin(x);
    case Fn::Acos: return std::acos(x);
    case Fn::Atan: return std::atan(x);
    }
    return 0.0;
}

NodePtr make_call(Fn fn, NodePtr arg)
{
    if (arg->kind == Kind::Constant) return make_const(apply(fn, arg->value));
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Call;
    n->fn = fn;
    n->lhs = std::move(arg);
    return n;
}

NodePtr make_binary(Kind kind, NodePtr a, NodePtr b);

NodePtr make_neg(NodePtr a)
{
    if (a->kind == Kind::Constant) return make_const(-a->value);
    if (a->kind == Kind::Negate) return a->lhs;
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Negate;
    n->lhs = std::move(a);
    return n;
}

NodePtr make_binary(Kind kind, NodePtr a, NodePtr b)
{
    if (a->kind == Kind::Constant && b->kind == Kind::Constant) {
        const double x = a->value, y = b->value;
        switch (kind) {
        case Kind::Add: return make_const(x + y);
        case Kind::Sub: return make_const(x - y);
        case Kind::Mul: return make_const(x * y);
        case Kind::Div: return make_const(x / y);
        case Kind::Pow: return make_const(std::pow(x, y));
        default: break;
        }
    }
    switch (kind) {
    case Kind::Add:
        if (is_const(a, 0.0)) return b;
        if (is_const(b, 0.0)) return a;
        break;
    case Kind::Sub:
        if (is_const(b, 0.0)) return a;
        if (is_const(a, 0.0)) return make_neg(b);
        break;
    case Kind::Mul:
        if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
        if (is_const(a, 1.0)) return b;
        if (is_const(b, 1.0)) return a;
        break;
    case Kind::Div:
        if (is_const(a, 0.0)) return make_const(0.0);
        if (is_const(b, 1.0)) return a;
        break;
    case Kind::Pow:
        if (is_const(b, 0.0)) return make_const(1.0);
        if (is_const(b, 1.0)) return a;
        break;
    default: break;
    }
    auto n = std::make_shared<Expression::Node>();
    n->kind = kind;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

NodePtr add(NodePtr a, NodePtr b) { return make_binary(Kind::Add, std::move(a), std::move(b)); }
NodePtr sub(NodePtr a, NodePtr b) { return make_binary(Kind::Sub, std::move(a), std::move(b)); }
NodePtr mul(NodePtr a, NodePtr b) { return make_binary(Kind::Mul, std::move(a), std::move(b)); }
NodePtr div(NodePtr a, NodePtr b) { return make_binary(Kind::Div, std::move(a), std::move(b)); }
NodePtr pow(NodePtr a, NodePtr b) { return make_binary(Kind::Pow, std::move(a), std::move(b)); }

double evaluate(const Expression::Node& n, std::span<const double> v)
{
    switch (n.kind) {
    case Kind::Constant: return n.value;
    case Kind::Variable: return v[n.variable];
    case Kind::Negate: return -evaluate(*n.lhs, v);
    case Kind::Add: return evaluate(*n.lhs, v) + evaluate(*n.rhs, v);
    case Kind::Sub: return evaluate(*n.lhs, v) - evaluate(*n.rhs, v);
    case Kind::Mul: return evaluate(*n.lhs, v) * evaluate(*n.rhs, v);
    case Kind::Div: return evaluate(*n.lhs, v) / evaluate(*n.rhs, v);
    case Kind::Pow: {
        const double base = evaluate(*n.lhs, v);
        if (n.rhs->kind == Kind::Constant) {
            const double e = n.rhs->value;
            if (e == 2.0) return base * base;
            if (e == 3.0) return base * base * base;
        }
        return std::pow(base, evaluate(*n.rhs, v));
    }
    case Kind::Call: return apply(n.fn, evaluate(*n.lhs, v));
    }
    return 0.0;
}

NodePtr differentiate(const NodePtr& n, std::size_t x)
{
    switch (n->kind) {
    case Kind::Constant: return make_const(0.0);
    case Kind::Variable: return make_const(n->variable == x ? 1.0 : 0.0);
    case Kind::Negate: return make_neg(differentiate(n->lhs, x));
    case Kind::Add: return add(differentiate(n->lhs, x), differentiate(n->rhs, x));
    case Kind::Sub: return sub(differentiate(n->lhs, x), differentiate(n->rhs, x));
    case Kind::Mul:
        return add(mul(differentiate(n->lhs, x), n->rhs), mul(n->lhs, differentiate(n->rhs, x)));
    case Kind::Div: {
        // (a/b)' = a'/b - a b' / b^2
        auto da = differentiate(n->lhs, x);
        auto db = differentiate(n->rhs, x);
        return sub(div(da, n->rhs), div(mul(n->lhs, db), pow(n->rhs, make_const(2.0))));
    }
    case Kind::Pow: {
        auto da = differentiate(n->lhs, x);
        if (n->rhs->kind == Kind::Constant) {
            const double e = n->rhs->value;
            return mul(mul(make_const(e), pow(n->lhs, make_const(e - 1.0))), da);
        }
        // a^b (b' log a + b a'/a)
        auto db = differentiate(n->rhs, x);
        auto inner = add(mul(db, make_call(Fn::Log, n->lhs)), div(mul(n->rhs, da), n->lhs));
        return mul(n, inner);
    }
    case Kind::Call: {
        const auto& a = n->lhs;
        auto da = differentiate(a, x);
        if (is_const(da, 0.0)) return make_const(0.0);
        NodePtr outer;
        switch (n->fn) {
        case Fn::Sin: outer = make_call(Fn::Cos, a); break;
        case Fn::Cos: outer = make_neg(make_call(Fn::Sin, a)); break;
        case Fn::Tan: outer = div(make_const(1.0), pow(make_call(Fn::Cos, a), make_const(2.0))); break;
        case Fn::Sinh: outer = make_call(Fn::Cosh, a); break;
        case Fn::Cosh: outer = make_call(Fn::Sinh, a); break;
        case Fn::Exp: outer = n; break;
        case Fn::Log: outer = div(make_const(1.0), a); break;
        case Fn::Sqrt: outer = div(make_const(0.5), n); break;
        case Fn::Asin:
            outer = div(make_const(1.0),
                        make_call(Fn::Sqrt, sub(make_const(1.0), pow(a, make_const(2.0)))));
            break;
        case Fn::Acos:
            outer = div(make_const(-1.0),
                        make_call(Fn::Sqrt, sub(make_const(1.0), pow(a, make_const(2.0)))));
            break;
        case Fn::Atan: outer = div(make_const(1.0), add(make_const(1.0), pow(a, make_const(2.0)))); break;
        }
        return mul(outer, da);
    }
    }
    return make_const(0.0);
}

void print(const Expression::Node& n, const std::vector<std::string>* names, std::ostream& os)
{
    switch (n.kind) {
    case Kind::Constant: os << n.value; return;
    case Kind::Variable: os << "x" << n.variable; return;
    case Kind::Negate: os << "(-"; print(*n.lhs, names, os); os << ")"; return;
    case Kind::Call: os << fn_name(n.fn) << "("; print(*n.lhs, names, os); os << ")"; return;
    default: break;
    }
    const char* op = n.kind == Kind::Add   ? "+"
                     : n.kind == Kind::Sub ? "-"
                     : n.kind == Kind::Mul ? "*"
                     : n.kind == Kind::Div ? "/"
                                           : "^";
    os << "(";
    print(*n.lhs, names, os);
    os << op;
    print(*n.rhs, names, os);
    os << ")";
}

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& vars,
           const std::map<std::string, double>& constants)
        : text_(text), vars_(vars), constants_(constants)
    {
    }

    NodePtr parse()
    {
        auto n = expression();
        skip_ws();
        if (pos_ != text_.size()) error("unexpected trailing input");
        return n;
    }

private:
    [[noreturn]] void error(const std::string& what) const
    {
        fail(ErrorCode::ConfigError, "expression '" + std::string(text_) + "': " + what + " at offset " +
                                         std::to_string(pos_));
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expression()
    {
        auto lhs = term();
        for (;;) {
            if (accept('+')) lhs = add(lhs, term());
            else if (accept('-')) lhs = sub(lhs, term());
            else return lhs;
        }
    }

    NodePtr term()
    {
        auto lhs = unary();
        for (;;) {
            if (accept('*')) lhs = mul(lhs, unary());
            else if (accept('/')) lhs = div(lhs, unary());
            else return lhs;
        }
    }

    // Unary minus binds looser than '^' so that -x^2 == -(x^2).
    NodePtr unary()
    {
        if (accept('-')) return make_neg(unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power()
    {
        auto base = primary();
        if (accept('^')) return pow(base, unary());
        return base;
    }

    NodePtr primary()
    {
        skip_ws();
        if (pos_ >= text_.size()) error("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto n = expression();
            if (!accept(')')) error("expected ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        error(std::string("unexpected character '") + c + "'");
    }

    NodePtr number()
    {
        const std::string rest(text_.substr(pos_));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(rest, &used);
        } catch (const std::exception&) {
            error("malformed number");
        }
        pos_ += used;
        return make_const(v);
    }

    NodePtr identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        if (auto it = kFunctions.find(name); it != kFunctions.end()) {
            if (!accept('(')) error("expected '(' after " + name);
            auto arg = expression();
            if (!accept(')')) error("expected ')'");
            return make_call(it->second, arg);
        }
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return make_var(i);
        if (auto it = constants_.find(name); it != constants_.end()) return make_const(it->second);
        if (name == "pi") return make_const(std::numbers::pi);
        error("unknown identifier '" + name + "'");
    }

    std::string_view text_;
    const std::vector<std::string>& vars_;
    const std::map<std::string, double>& constants_;
    std::size_t pos_ = 0;
};

} // namespace

Expression::Expression() : root_(make_const(0.0)), arity_(0) {}

Expression::Expression(std::shared_ptr<const Node> root, std::size_t arity)
    : root_(std::move(root)), arity_(arity)
{
}

Expression Expression::parse(std::string_view text, const std::vector<std::string>& variables,
                             const std::map<std::string, double>& constants)
{
    Parser p(text, variables, constants);
    return Expression(p.parse(), variables.size());
}

Expression Expression::constant(double value) { return Expression(make_const(value), 0); }

double Expression::operator()(std::span<const double> values) const
{
    return evaluate(*root_, values);
}

Expression Expression::derivative(std::size_t variable) const
{
    return Expression(differentiate(root_, variable), arity_);
}

bool Expression::is_constant() const { return root_->kind == Kind::Constant; }

std::string Expression::to_string() const
{
    std::ostringstream os;
    os.precision(17);
    print(*root_, nullptr, os);
    return os.str();
}

} // namespace rotbonnet::expr
