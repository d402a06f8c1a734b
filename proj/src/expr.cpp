#include "cellwave/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "cellwave/error.hpp"

namespace cellwave {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message,
                       std::vector<std::string> expected)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << line << ":" << column << ": " << message;
        if (!expected.empty()) {
          os << " (expected ";
          for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
          os << ")";
        }
        return os.str();
      }()),
      line_(line),
      column_(column),
      detail_(message),
      expected_(std::move(expected)) {}

NumericalError::NumericalError(double time, std::size_t grid_index, const std::string& what)
    : std::runtime_error(what + " at t=" + std::to_string(time) + ", grid index " +
                         std::to_string(grid_index)),
      time_(time),
      grid_index_(grid_index) {}

namespace {

struct FuncEntry {
  UnaryFunc f;
  std::string_view name;
};
constexpr FuncEntry kFuncs[] = {
    {UnaryFunc::Exp, "exp"},   {UnaryFunc::Log, "log"},   {UnaryFunc::Sqrt, "sqrt"},
    {UnaryFunc::Sin, "sin"},   {UnaryFunc::Cos, "cos"},   {UnaryFunc::Tan, "tan"},
    {UnaryFunc::Sinh, "sinh"}, {UnaryFunc::Cosh, "cosh"}, {UnaryFunc::Tanh, "tanh"},
    {UnaryFunc::Atan, "atan"}, {UnaryFunc::Abs, "abs"},
};

double apply_func(UnaryFunc f, double x) {
  switch (f) {
    case UnaryFunc::Exp: return std::exp(x);
    case UnaryFunc::Log: return std::log(x);
    case UnaryFunc::Sqrt: return std::sqrt(x);
    case UnaryFunc::Sin: return std::sin(x);
    case UnaryFunc::Cos: return std::cos(x);
    case UnaryFunc::Tan: return std::tan(x);
    case UnaryFunc::Sinh: return std::sinh(x);
    case UnaryFunc::Cosh: return std::cosh(x);
    case UnaryFunc::Tanh: return std::tanh(x);
    case UnaryFunc::Atan: return std::atan(x);
    case UnaryFunc::Abs: return std::fabs(x);
  }
  return x;
}

bool small_integer(double e, long& n) {
  if (e != std::floor(e) || std::fabs(e) > 64.0) return false;
  n = static_cast<long>(e);
  return true;
}

double ipow(double base, long n) {
  const bool invert = n < 0;
  unsigned long k = static_cast<unsigned long>(invert ? -n : n);
  double result = 1.0;
  double b = base;
  bool first = true;
  while (k) {
    if (k & 1UL) {
      result = first ? b : result * b;
      first = false;
    }
    k >>= 1UL;
    if (k) b *= b;
  }
  return invert ? 1.0 / result : result;
}

}  // namespace

std::optional<UnaryFunc> unary_func_from_name(std::string_view name) {
  for (const auto& e : kFuncs)
    if (e.name == name) return e.f;
  return std::nullopt;
}

std::string_view unary_func_name(UnaryFunc f) {
  for (const auto& e : kFuncs)
    if (e.f == f) return e.name;
  return "?";
}

double power(double base, double exponent) {
  long n = 0;
  if (small_integer(exponent, n)) return ipow(base, n);
  return std::pow(base, exponent);
}

// ---------------------------------------------------------------------------
// Expr

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  std::string name;
  UnaryFunc func = UnaryFunc::Exp;
  Expr a;
  Expr b;
};

Expr::Expr() : node_(nullptr) {}
Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::symbol(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Symbol;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::negate(Expr operand) {
  if (operand.kind() == Kind::Constant) return constant(-operand.value());
  auto n = std::make_shared<Node>();
  n->kind = Kind::Negate;
  n->a = std::move(operand);
  return Expr(std::move(n));
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs) {
  if (kind != Kind::Add && kind != Kind::Sub && kind != Kind::Mul && kind != Kind::Div &&
      kind != Kind::Pow)
    throw ModelError("Expr::binary: not a binary operator");
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return Expr(std::move(n));
}

Expr Expr::call(UnaryFunc func, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->func = func;
  n->a = std::move(arg);
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_ ? node_->kind : Kind::Constant; }
double Expr::value() const { return node_ ? node_->value : 0.0; }
const std::string& Expr::name() const {
  static const std::string empty;
  return node_ ? node_->name : empty;
}
UnaryFunc Expr::func() const { return node_ ? node_->func : UnaryFunc::Exp; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }

double Expr::evaluate(const std::function<double(const std::string&)>& lookup) const {
  switch (kind()) {
    case Kind::Constant: return value();
    case Kind::Symbol: return lookup(name());
    case Kind::Negate: return -lhs().evaluate(lookup);
    case Kind::Add: return lhs().evaluate(lookup) + rhs().evaluate(lookup);
    case Kind::Sub: return lhs().evaluate(lookup) - rhs().evaluate(lookup);
    case Kind::Mul: return lhs().evaluate(lookup) * rhs().evaluate(lookup);
    case Kind::Div: return lhs().evaluate(lookup) / rhs().evaluate(lookup);
    case Kind::Pow: return power(lhs().evaluate(lookup), rhs().evaluate(lookup));
    case Kind::Call: return apply_func(func(), lhs().evaluate(lookup));
  }
  return 0.0;
}

std::vector<std::string> Expr::symbols() const {
  std::set<std::string> out;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    switch (e.kind()) {
      case Kind::Constant: return;
      case Kind::Symbol: out.insert(e.name()); return;
      case Kind::Negate:
      case Kind::Call: walk(e.lhs()); return;
      default: walk(e.lhs()); walk(e.rhs()); return;
    }
  };
  walk(*this);
  return {out.begin(), out.end()};
}

namespace {

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Negate: return 3;
    case Expr::Kind::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[32];
  // shortest representation that round-trips
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void print(const Expr& e, std::string& out) {
  using K = Expr::Kind;
  auto wrap = [&](const Expr& child, bool need) {
    if (need) out += '(';
    print(child, out);
    if (need) out += ')';
  };
  switch (e.kind()) {
    case K::Constant: {
      const std::string s = format_number(e.value());
      if (std::signbit(e.value())) {
        out += '(' + s + ')';
      } else {
        out += s;
      }
      return;
    }
    case K::Symbol: out += e.name(); return;
    case K::Call:
      out += unary_func_name(e.func());
      out += '(';
      print(e.lhs(), out);
      out += ')';
      return;
    case K::Negate:
      out += '-';
      // `-` followed directly by a literal would fold into the constant
      wrap(e.lhs(), precedence(e.lhs().kind()) < precedence(K::Negate) ||
                        e.lhs().kind() == K::Constant || e.lhs().kind() == K::Negate);
      return;
    case K::Pow:
      // right associative: left operand needs parens unless atomic
      wrap(e.lhs(), precedence(e.lhs().kind()) <= precedence(K::Pow));
      out += '^';
      wrap(e.rhs(), precedence(e.rhs().kind()) < precedence(K::Pow) &&
                        e.rhs().kind() != K::Negate);
      return;
    default: {
      const int p = precedence(e.kind());
      wrap(e.lhs(), precedence(e.lhs().kind()) < p);
      switch (e.kind()) {
        case K::Add: out += " + "; break;
        case K::Sub: out += " - "; break;
        case K::Mul: out += "*"; break;
        default: out += "/"; break;
      }
      // left associative: equal precedence on the right needs parens
      wrap(e.rhs(), precedence(e.rhs().kind()) <= p);
      return;
    }
  }
}

}  // namespace

std::string Expr::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

bool operator==(const Expr& a, const Expr& b) {
  using K = Expr::Kind;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case K::Constant: {
      const double x = a.value(), y = b.value();
      return x == y && std::signbit(x) == std::signbit(y);
    }
    case K::Symbol: return a.name() == b.name();
    case K::Negate: return a.lhs() == b.lhs();
    case K::Call: return a.func() == b.func() && a.lhs() == b.lhs();
    default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

Expr operator+(Expr a, Expr b) { return Expr::binary(Expr::Kind::Add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(Expr::Kind::Sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(Expr::Kind::Mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::binary(Expr::Kind::Div, std::move(a), std::move(b)); }
Expr pow(Expr a, Expr b) { return Expr::binary(Expr::Kind::Pow, std::move(a), std::move(b)); }

// ---------------------------------------------------------------------------
// Parser

namespace {

class ExprParser {
 public:
  ExprParser(std::string_view text, std::size_t line, std::size_t col0)
      : text_(text), line_(line), col0_(col0) {}

  Expr parse_all() {
    skip_ws();
    if (pos_ >= text_.size()) fail("empty expression", {"number", "identifier", "'('", "'-'"});
    Expr e = parse_sum();
    skip_ws();
    if (pos_ < text_.size())
      fail(std::string("unexpected '") + text_[pos_] + "'", {"operator", "end of expression"});
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) const {
    throw ParseError(line_, col0_ + pos_ + 1, msg, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + parse_product();
      } else if (accept('-')) {
        lhs = lhs - parse_product();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * parse_unary();
      } else if (accept('/')) {
        lhs = lhs / parse_unary();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::negate(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) return pow(std::move(base), parse_unary());
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size())
      fail("unexpected end of expression", {"number", "identifier", "'('"});
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      if (!accept(')')) fail("unbalanced parenthesis", {"')'"});
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string ident(text_.substr(start, pos_ - start));
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        auto f = unary_func_from_name(ident);
        if (!f) {
          pos_ = start;
          fail("unknown function '" + ident + "'", {"exp", "log", "sqrt", "..."});
        }
        ++pos_;
        Expr arg = parse_sum();
        if (!accept(')')) fail("unbalanced parenthesis", {"')'"});
        return Expr::call(*f, std::move(arg));
      }
      return Expr::symbol(std::move(ident));
    }
    fail(std::string("unexpected '") + c + "'", {"number", "identifier", "'('", "'-'"});
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    const std::string lit(text_.substr(start, pos_ - start));
    if (lit == ".") {
      pos_ = start;
      fail("malformed number", {"digit"});
    }
    char* end = nullptr;
    const double v = std::strtod(lit.c_str(), &end);
    if (end != lit.c_str() + lit.size() || !std::isfinite(v)) {
      pos_ = start;
      fail("malformed number '" + lit + "'", {"finite decimal number"});
    }
    return Expr::constant(v);
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t col0_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text, std::size_t line, std::size_t column_offset) {
  return ExprParser(text, line, column_offset).parse_all();
}

// ---------------------------------------------------------------------------
// BoundExpr

BoundExpr::BoundExpr(const Expr& expr, const std::map<std::string, std::size_t>& slots,
                     const std::map<std::string, double>& constants) {
  std::function<void(const Expr&)> emit = [&](const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind()) {
      case K::Constant: postfix_.push_back({K::Constant, e.value()}); return;
      case K::Symbol: {
        if (auto it = slots.find(e.name()); it != slots.end()) {
          postfix_.push_back({K::Symbol, 0.0, it->second});
        } else if (auto jt = constants.find(e.name()); jt != constants.end()) {
          postfix_.push_back({K::Constant, jt->second});
        } else {
          throw ModelError("unresolved symbol '" + e.name() + "'");
        }
        return;
      }
      case K::Negate:
        emit(e.lhs());
        postfix_.push_back({K::Negate});
        return;
      case K::Call:
        emit(e.lhs());
        postfix_.push_back({K::Call, 0.0, 0, e.func()});
        return;
      default:
        emit(e.lhs());
        emit(e.rhs());
        postfix_.push_back({e.kind()});
        return;
    }
  };
  emit(expr);
  std::size_t depth = 0, max_depth = 0;
  for (const Op& op : postfix_) {
    if (op.kind == Expr::Kind::Constant || op.kind == Expr::Kind::Symbol) {
      max_depth = std::max(max_depth, ++depth);
    } else if (op.kind != Expr::Kind::Negate && op.kind != Expr::Kind::Call) {
      --depth;
    }
  }
  if (max_depth > kMaxStack) throw ModelError("expression nesting too deep");
}

double BoundExpr::operator()(std::span<const double> vars) const {
  double stack[kMaxStack];
  std::size_t top = 0;
  for (const Op& op : postfix_) {
    using K = Expr::Kind;
    switch (op.kind) {
      case K::Constant: stack[top++] = op.value; break;
      case K::Symbol: stack[top++] = vars[op.slot]; break;
      case K::Negate: stack[top - 1] = -stack[top - 1]; break;
      case K::Call: stack[top - 1] = apply_func(op.func, stack[top - 1]); break;
      case K::Add: --top; stack[top - 1] = stack[top - 1] + stack[top]; break;
      case K::Sub: --top; stack[top - 1] = stack[top - 1] - stack[top]; break;
      case K::Mul: --top; stack[top - 1] = stack[top - 1] * stack[top]; break;
      case K::Div: --top; stack[top - 1] = stack[top - 1] / stack[top]; break;
      case K::Pow: --top; stack[top - 1] = power(stack[top - 1], stack[top]); break;
    }
  }
  return top ? stack[0] : 0.0;
}

// ---------------------------------------------------------------------------
// BlockProgram

BlockProgram::BlockProgram(const std::vector<Expr>& outputs,
                           const std::map<std::string, std::size_t>& slots,
                           const std::map<std::string, double>& constants) {
  for (const Expr& e : outputs) outputs_.push_back(emit(e, slots, constants));
}

std::size_t BlockProgram::emit(const Expr& e, const std::map<std::string, std::size_t>& slots,
                               const std::map<std::string, double>& constants) {
  using K = Expr::Kind;
  const auto fresh = [&] { return n_registers_++; };
  switch (e.kind()) {
    case K::Constant: {
      const std::size_t r = fresh();
      code_.push_back({Code::Const, r, 0, 0, e.value()});
      return r;
    }
    case K::Symbol: {
      const std::size_t r = fresh();
      if (auto it = slots.find(e.name()); it != slots.end()) {
        code_.push_back({Code::Load, r, it->second});
      } else if (auto jt = constants.find(e.name()); jt != constants.end()) {
        code_.push_back({Code::Const, r, 0, 0, jt->second});
      } else {
        throw ModelError("unresolved symbol '" + e.name() + "'");
      }
      return r;
    }
    case K::Negate: {
      const std::size_t a = emit(e.lhs(), slots, constants);
      const std::size_t r = fresh();
      code_.push_back({Code::Neg, r, a});
      return r;
    }
    case K::Call: {
      const std::size_t a = emit(e.lhs(), slots, constants);
      const std::size_t r = fresh();
      code_.push_back({Code::Call, r, a, 0, 0.0, e.func()});
      return r;
    }
    default: break;
  }
  const std::size_t a = emit(e.lhs(), slots, constants);
  if (e.kind() == K::Pow && e.rhs().kind() == K::Constant) {
    long n = 0;
    if (small_integer(e.rhs().value(), n)) {
      const std::size_t r = fresh();
      code_.push_back({Code::PowInt, r, a, 0, e.rhs().value()});
      return r;
    }
  }
  const std::size_t b = emit(e.rhs(), slots, constants);
  const std::size_t r = fresh();
  Code c = Code::Add;
  switch (e.kind()) {
    case K::Add: c = Code::Add; break;
    case K::Sub: c = Code::Sub; break;
    case K::Mul: c = Code::Mul; break;
    case K::Div: c = Code::Div; break;
    default: c = Code::Pow; break;
  }
  code_.push_back({c, r, a, b});
  return r;
}

void BlockProgram::run(std::span<const double* const> inputs, std::span<double* const> out,
                       std::size_t count, std::span<double> scratch) const {
  double* reg = scratch.data();
  for (const Instr& in : code_) {
    double* d = reg + in.dst * kBlock;
    const double* x = reg + in.a * kBlock;
    const double* y = reg + in.b * kBlock;
    switch (in.code) {
      case Code::Load: {
        const double* src = inputs[in.a];
        for (std::size_t i = 0; i < count; ++i) d[i] = src[i];
        break;
      }
      case Code::Const:
        for (std::size_t i = 0; i < count; ++i) d[i] = in.imm;
        break;
      case Code::Neg:
        for (std::size_t i = 0; i < count; ++i) d[i] = -x[i];
        break;
      case Code::Add:
        for (std::size_t i = 0; i < count; ++i) d[i] = x[i] + y[i];
        break;
      case Code::Sub:
        for (std::size_t i = 0; i < count; ++i) d[i] = x[i] - y[i];
        break;
      case Code::Mul:
        for (std::size_t i = 0; i < count; ++i) d[i] = x[i] * y[i];
        break;
      case Code::Div:
        for (std::size_t i = 0; i < count; ++i) d[i] = x[i] / y[i];
        break;
      case Code::PowInt:
        if (in.imm == 2.0) {
          for (std::size_t i = 0; i < count; ++i) d[i] = x[i] * x[i];
        } else {
          for (std::size_t i = 0; i < count; ++i) d[i] = power(x[i], in.imm);
        }
        break;
      case Code::Pow:
        for (std::size_t i = 0; i < count; ++i) d[i] = power(x[i], y[i]);
        break;
      case Code::Call:
        for (std::size_t i = 0; i < count; ++i) d[i] = apply_func(in.func, x[i]);
        break;
    }
  }
  for (std::size_t j = 0; j < outputs_.size(); ++j) {
    const double* src = reg + outputs_[j] * kBlock;
    std::copy(src, src + count, out[j]);
  }
}

}  // namespace cellwave
