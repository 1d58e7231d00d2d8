#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rotbonnet::expr {

/// Compiled arithmetic expression over a fixed list of named variables.
///
/// Grammar: numbers, variables, named constants, `pi`, the binary operators
/// `+ - * / ^` (with `^` right-associative), unary minus, parentheses and the
/// functions sin cos tan sinh cosh exp log sqrt asin acos atan.
///
/// Expressions are immutable and cheap to copy; `derivative` builds a new
/// expression symbolically, so derived fields carry analytic partials.
class Expression {
public:
    struct Node;

    Expression();

    static Expression parse(std::string_view text,
                            const std::vector<std::string>& variables,
                            const std::map<std::string, double>& constants = {});
    static Expression constant(double value);

    double operator()(std::span<const double> values) const;
    double operator()(std::initializer_list<double> values) const
    {
        return (*this)(std::span<const double>(values.begin(), values.size()));
    }

    Expression derivative(std::size_t variable) const;

    bool is_constant() const;
    std::string to_string() const;
    std::size_t arity() const noexcept { return arity_; }

private:
    Expression(std::shared_ptr<const Node> root, std::size_t arity);

    std::shared_ptr<const Node> root_;
    std::size_t arity_ = 0;
};

} // namespace rotbonnet::expr
