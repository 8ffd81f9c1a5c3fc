#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>

#include "liouville/errors.hpp"

namespace liouville {

using Complex = std::complex<double>;

/// Result of evaluating a potential at one point. Instead of throwing, the
/// evaluator sets `near_pole` when a magnitude passes the overflow sentinel
/// (1e100), a denominator drops below 1e-30, or a non-finite value appears,
/// so grid sweeps can report the offending point and keep going.
struct EvalResult {
    Complex value{};
    bool near_pole = false;
};

/// A holomorphic perturbation potential p(z), parsed from a small
/// branch-cut-free expression language:
///
///   expr     = term { ("+"|"-") term }
///   term     = unary { ("*"|"/") unary }
///   unary    = "-" unary | power
///   power    = atom [ "^" [-] integer ]        integer in [-16, 16]
///   atom     = number | "i" | "pi" | "z" | fn "(" expr ")" | "(" expr ")"
///   fn       = exp | sin | cos | sinh | cosh | tanh | sech
///
/// Numbers may carry a trailing "i" (e.g. "0.5i"). log, sqrt, and "^" with a
/// non-integer exponent are rejected: every admitted primitive is entire or
/// meromorphic, so the parsed function is single valued and holomorphic
/// wherever it is finite.
class PotentialExpr {
public:
    PotentialExpr() = default;  // constant zero

    static PotentialExpr parse(std::string_view text);

    EvalResult eval(Complex z) const;

    /// Same as eval() but throws PoleProximityError instead of flagging.
    Complex value_at(Complex z) const;

    const std::string& source_text() const { return source_; }

    /// Pretty-print; re-parsing the result evaluates identically.
    std::string pretty() const;

    bool is_zero_literal() const;

    /// True when no node depends on z, so the potential is a constant.
    bool is_constant() const;

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

}  // namespace liouville
