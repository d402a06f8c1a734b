#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cellwave {

enum class UnaryFunc { Exp, Log, Sqrt, Sin, Cos, Tan, Sinh, Cosh, Tanh, Atan, Abs };

std::optional<UnaryFunc> unary_func_from_name(std::string_view name);
std::string_view unary_func_name(UnaryFunc f);

/// Immutable expression tree over named symbols.
///
/// Nodes are shared, so copies are cheap. Negation of a literal is folded at
/// construction (`-(3)` and `-3` both become the constant -3), which keeps
/// print/parse round trips structurally exact.
class Expr {
 public:
  enum class Kind { Constant, Symbol, Negate, Add, Sub, Mul, Div, Pow, Call };

  Expr();  // the constant 0

  static Expr constant(double value);
  static Expr symbol(std::string name);
  static Expr negate(Expr operand);
  static Expr binary(Kind kind, Expr lhs, Expr rhs);
  static Expr call(UnaryFunc func, Expr arg);

  Kind kind() const;
  double value() const;               // Constant
  const std::string& name() const;    // Symbol
  UnaryFunc func() const;             // Call
  const Expr& lhs() const;            // binary, or the operand of Negate / Call
  const Expr& rhs() const;            // binary

  /// Evaluate with a name lookup; throws ModelError on unknown names.
  double evaluate(const std::function<double(const std::string&)>& lookup) const;

  /// Every distinct symbol referenced, sorted.
  std::vector<std::string> symbols() const;

  /// Canonical text with minimal parentheses; `parse_expression(to_string())`
  /// reproduces a structurally equal tree.
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr pow(Expr a, Expr b);

/// Power with the convention used by every evaluator in the library:
/// small integral exponents are expanded into multiplications.
double power(double base, double exponent);

/// Parse a standalone expression. Grammar (precedence low to high):
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' unary)?          right associative
///   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
/// `line` and `column_offset` place diagnostics inside a larger file.
Expr parse_expression(std::string_view text, std::size_t line = 1,
                      std::size_t column_offset = 0);

/// An expression with its symbols resolved to slots of a variable vector.
/// This is the scalar reference evaluator.
class BoundExpr {
 public:
  BoundExpr() = default;
  /// `slots` maps symbol name to index in the variable vector; names found in
  /// `constants` are substituted by value. Unknown names throw ModelError.
  BoundExpr(const Expr& expr, const std::map<std::string, std::size_t>& slots,
            const std::map<std::string, double>& constants);

  double operator()(std::span<const double> vars) const;

 private:
  struct Op {
    Expr::Kind kind;
    double value = 0.0;
    std::size_t slot = 0;
    UnaryFunc func = UnaryFunc::Exp;
  };
  static constexpr std::size_t kMaxStack = 128;
  std::vector<Op> postfix_;  // evaluated with a small stack
};

/// A set of expressions compiled into register code evaluated over blocks of
/// grid cells at a time. Results are bit-identical to BoundExpr.
class BlockProgram {
 public:
  static constexpr std::size_t kBlock = 64;

  BlockProgram() = default;
  BlockProgram(const std::vector<Expr>& outputs, const std::map<std::string, std::size_t>& slots,
               const std::map<std::string, double>& constants);

  std::size_t output_count() const { return outputs_.size(); }
  std::size_t register_count() const { return n_registers_; }

  /// inputs[s] points at `count` values of variable s; out[j] receives `count`
  /// values of output j. `scratch` must hold register_count()*kBlock doubles.
  /// count <= kBlock.
  void run(std::span<const double* const> inputs, std::span<double* const> out,
           std::size_t count, std::span<double> scratch) const;

 private:
  enum class Code { Load, Const, Neg, Add, Sub, Mul, Div, PowInt, Pow, Call };
  struct Instr {
    Code code;
    std::size_t dst;
    std::size_t a = 0;
    std::size_t b = 0;
    double imm = 0.0;
    UnaryFunc func = UnaryFunc::Exp;
  };
  std::size_t emit(const Expr& e, const std::map<std::string, std::size_t>& slots,
                   const std::map<std::string, double>& constants);

  std::vector<Instr> code_;
  std::vector<std::size_t> outputs_;
  std::size_t n_registers_ = 0;
};

}  // namespace cellwave
