#include "bestapprox/expr.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <set>

#include "bestapprox/error.hpp"

namespace bestapprox {

namespace {

using Node = Expression::Node;
using NodePtr = Expression::NodePtr;
using Kind = Expression::Kind;
using Func = Expression::Func;

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->value = v;
  return n;
}

NodePtr make_node(Kind kind, std::vector<NodePtr> args) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->args = std::move(args);
  return n;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Number, Ident, Op, LParen, RParen, Comma, End };

struct Token {
  Tok type = Tok::End;
  std::size_t offset = 0;
  std::string_view text;
  double number = 0.0;
};

bool is_ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    Token t;
    t.offset = i;
    if (is_digit(c) || (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      std::size_t j = i;
      while (j < s.size() && is_digit(s[j])) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && is_digit(s[j])) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && is_digit(s[k])) {
          while (k < s.size() && is_digit(s[k])) ++k;
          j = k;
        }
      }
      t.type = Tok::Number;
      t.text = s.substr(i, j - i);
      // from_chars rejects a leading '.', so parse "0" + text in that case.
      std::string buf = t.text.front() == '.' ? "0" + std::string(t.text) : std::string(t.text);
      auto [ptr, ec] = std::from_chars(buf.data(), buf.data() + buf.size(), t.number);
      if (ec != std::errc() || ptr != buf.data() + buf.size() || !std::isfinite(t.number)) {
        throw ParseError("invalid number '" + std::string(t.text) + "'", i);
      }
      i = j;
    } else if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && is_ident_char(s[j])) ++j;
      t.type = Tok::Ident;
      t.text = s.substr(i, j - i);
      i = j;
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      t.type = Tok::Op;
      t.text = s.substr(i, 1);
      ++i;
    } else if (c == '(') {
      t.type = Tok::LParen;
      ++i;
    } else if (c == ')') {
      t.type = Tok::RParen;
      ++i;
    } else if (c == ',') {
      t.type = Tok::Comma;
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back(t);
  }
  Token end;
  end.type = Tok::End;
  end.offset = s.size();
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  NodePtr parse_all() {
    NodePtr e = parse_sum();
    if (peek().type != Tok::End) fail("unexpected token");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool peek_op(char op) const {
    return peek().type == Tok::Op && peek().text.front() == op;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    if (t.type == Tok::End) {
      // Point at the last token read: that is where the input stops making sense.
      std::size_t at = pos_ > 0 ? toks_[pos_ - 1].offset : 0;
      throw ParseError("unexpected end of input", at);
    }
    throw ParseError(what, t.offset);
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    while (peek_op('+') || peek_op('-')) {
      Kind k = next().text.front() == '+' ? Kind::Add : Kind::Sub;
      lhs = make_node(k, {lhs, parse_product()});
    }
    return lhs;
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    while (peek_op('*') || peek_op('/')) {
      Kind k = next().text.front() == '*' ? Kind::Mul : Kind::Div;
      lhs = make_node(k, {lhs, parse_unary()});
    }
    return lhs;
  }

  NodePtr parse_unary() {
    if (peek_op('-')) {
      next();
      return make_node(Kind::Negate, {parse_unary()});
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (peek_op('^')) {
      next();
      return make_node(Kind::Pow, {base, parse_unary()});
    }
    return base;
  }

  NodePtr parse_primary() {
    const Token& t = peek();
    switch (t.type) {
      case Tok::Number:
        next();
        return make_number(t.number);
      case Tok::LParen: {
        next();
        NodePtr e = parse_sum();
        if (peek().type != Tok::RParen) fail("expected ')'");
        next();
        return e;
      }
      case Tok::Ident: {
        next();
        if (peek().type != Tok::LParen) {
          auto n = std::make_shared<Node>();
          n->kind = Kind::Variable;
          n->name = std::string(t.text);
          return n;
        }
        return parse_call(t);
      }
      default:
        fail("expected a number, variable, function call or '('");
    }
  }

  NodePtr parse_call(const Token& name) {
    static const std::map<std::string_view, std::pair<Func, int>> kFuncs = {
        {"sqrt", {Func::Sqrt, 1}}, {"abs", {Func::Abs, 1}}, {"exp", {Func::Exp, 1}},
        {"log", {Func::Log, 1}},   {"min", {Func::Min, 2}}, {"max", {Func::Max, 2}},
    };
    auto it = kFuncs.find(name.text);
    if (it == kFuncs.end()) {
      throw ParseError("unknown function '" + std::string(name.text) + "'", name.offset);
    }
    next();  // '('
    std::vector<NodePtr> args;
    args.push_back(parse_sum());
    while (peek().type == Tok::Comma) {
      next();
      args.push_back(parse_sum());
    }
    if (peek().type != Tok::RParen) fail("expected ',' or ')'");
    next();
    if (static_cast<int>(args.size()) != it->second.second) {
      throw ParseError("function '" + std::string(name.text) + "' takes " +
                           std::to_string(it->second.second) + " argument(s)",
                       name.offset);
    }
    auto n = make_node(Kind::Call, std::move(args));
    std::const_pointer_cast<Node>(n)->func = it->second.first;
    return n;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void collect_variables(const Node& n, std::set<std::string>& out) {
  if (n.kind == Kind::Variable) out.insert(n.name);
  for (const auto& a : n.args) collect_variables(*a, out);
}

// ---------------------------------------------------------------------------
// Printing

int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub:
      return 1;
    case Kind::Mul:
    case Kind::Div:
      return 2;
    case Kind::Negate:
      return 3;
    case Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Min: return "min";
    case Func::Max: return "max";
  }
  return "?";
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print_node(child, out);
  if (parens) out += ')';
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Number:
      // Negative literals only arise from Expression::constant; keep them atomic.
      if (n.value < 0 || std::signbit(n.value)) {
        out += '(' + format_number(n.value) + ')';
      } else {
        out += format_number(n.value);
      }
      return;
    case Kind::Variable:
      out += n.name;
      return;
    case Kind::Negate:
      out += '-';
      print_child(*n.args[0], precedence(*n.args[0]) < 3, out);
      return;
    case Kind::Pow:
      print_child(*n.args[0], precedence(*n.args[0]) <= 4, out);
      out += '^';
      print_child(*n.args[1], precedence(*n.args[1]) < 3, out);
      return;
    case Kind::Call:
      out += func_name(n.func);
      out += '(';
      for (std::size_t k = 0; k < n.args.size(); ++k) {
        if (k > 0) out += ", ";
        print_node(*n.args[k], out);
      }
      out += ')';
      return;
    default: {
      const int p = precedence(n);
      static const char* kOps[] = {" + ", " - ", "*", "/"};
      const char* op = kOps[static_cast<int>(n.kind) - static_cast<int>(Kind::Add)];
      print_child(*n.args[0], precedence(*n.args[0]) < p, out);
      out += op;
      print_child(*n.args[1], precedence(*n.args[1]) <= p, out);
      return;
    }
  }
}

bool same_tree(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Kind::Number:
      if (std::bit_cast<std::uint64_t>(a.value) != std::bit_cast<std::uint64_t>(b.value)) {
        return false;
      }
      break;
    case Kind::Variable:
      if (a.name != b.name) return false;
      break;
    case Kind::Call:
      if (a.func != b.func) return false;
      break;
    default:
      break;
  }
  for (std::size_t k = 0; k < a.args.size(); ++k) {
    if (!same_tree(*a.args[k], *b.args[k])) return false;
  }
  return true;
}

NodePtr rename_node(const NodePtr& n,
                    const std::function<std::string(const std::string&)>& rename) {
  if (n->kind == Kind::Variable) {
    auto copy = std::make_shared<Node>(*n);
    copy->name = rename(n->name);
    return copy;
  }
  if (n->args.empty()) return n;
  auto copy = std::make_shared<Node>(*n);
  for (auto& a : copy->args) a = rename_node(a, rename);
  return copy;
}

NodePtr substitute_node(const NodePtr& n, const Env& values) {
  if (n->kind == Kind::Variable) {
    auto it = values.find(n->name);
    return it == values.end() ? n : make_number(it->second);
  }
  if (n->args.empty()) return n;
  auto copy = std::make_shared<Node>(*n);
  for (auto& a : copy->args) a = substitute_node(a, values);
  return copy;
}

// ---------------------------------------------------------------------------
// Evaluation

std::string describe(const Node& n) {
  std::string s;
  print_node(n, s);
  return s;
}

double integer_power(double base, double exponent) {
  const bool negative = exponent < 0;
  const double m = std::fabs(exponent);
  double r;
  if (m <= 1024) {
    r = 1.0;
    for (long k = 0; k < static_cast<long>(m); ++k) r *= base;
  } else {
    r = std::pow(base, m);
  }
  if (negative) {
    if (r == 0.0) throw EvalError("division by zero in " + std::string("negative power"));
    r = 1.0 / r;
  }
  return r;
}

class Evaluator {
 public:
  Evaluator(const std::vector<std::string>& names, std::span<const double> values)
      : names_(names), values_(values) {}

  double eval(const Node& n) const {
    switch (n.kind) {
      case Kind::Number:
        return n.value;
      case Kind::Variable: {
        auto it = std::lower_bound(names_.begin(), names_.end(), n.name);
        return values_[static_cast<std::size_t>(it - names_.begin())];
      }
      case Kind::Negate:
        return -eval(*n.args[0]);
      case Kind::Add:
        return eval(*n.args[0]) + eval(*n.args[1]);
      case Kind::Sub:
        return eval(*n.args[0]) - eval(*n.args[1]);
      case Kind::Mul:
        return eval(*n.args[0]) * eval(*n.args[1]);
      case Kind::Div: {
        const double num = eval(*n.args[0]);
        const double den = eval(*n.args[1]);
        if (den == 0.0) throw EvalError("division by zero in '" + describe(n) + "'");
        return num / den;
      }
      case Kind::Pow:
        return power(n);
      case Kind::Call:
        return call(n);
    }
    return 0.0;
  }

 private:
  double power(const Node& n) const {
    const double base = eval(*n.args[0]);
    const double ex = eval(*n.args[1]);
    if (std::isfinite(ex) && ex == std::trunc(ex)) {
      if (ex < 0 && base == 0.0) {
        throw EvalError("division by zero in '" + describe(n) + "'");
      }
      return integer_power(base, ex);
    }
    if (base > 0) return std::exp(ex * std::log(base));
    if (base == 0.0 && ex > 0) return 0.0;
    throw EvalError("non-integer power of non-positive base in '" + describe(n) + "'");
  }

  double call(const Node& n) const {
    const double a = eval(*n.args[0]);
    switch (n.func) {
      case Func::Sqrt:
        if (a < 0) throw EvalError("sqrt of negative value in '" + describe(n) + "'");
        return std::sqrt(a);
      case Func::Abs:
        return std::fabs(a);
      case Func::Exp:
        return std::exp(a);
      case Func::Log:
        if (!(a > 0)) throw EvalError("log of non-positive value in '" + describe(n) + "'");
        return std::log(a);
      case Func::Min:
        return std::min(a, eval(*n.args[1]));
      case Func::Max:
        return std::max(a, eval(*n.args[1]));
    }
    return 0.0;
  }

  const std::vector<std::string>& names_;
  std::span<const double> values_;
};

}  // namespace

Expression::Expression() : Expression(make_number(0.0)) {}

Expression::Expression(NodePtr root) : root_(std::move(root)) {
  std::set<std::string> names;
  collect_variables(*root_, names);
  variables_.assign(names.begin(), names.end());
}

Expression Expression::constant(double value) { return Expression(make_number(value)); }

bool Expression::uses(std::string_view name) const {
  return std::binary_search(variables_.begin(), variables_.end(), name);
}

double Expression::evaluate(std::span<const double> values) const {
  if (values.size() != variables_.size()) {
    throw DimensionError("expression expects " + std::to_string(variables_.size()) +
                         " variable values, got " + std::to_string(values.size()));
  }
  return Evaluator(variables_, values).eval(*root_);
}

Expression Expression::rename(
    const std::function<std::string(const std::string&)>& rename) const {
  return Expression(rename_node(root_, rename));
}

Expression Expression::substitute(const Env& values) const {
  return Expression(substitute_node(root_, values));
}

std::string Expression::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

bool operator==(const Expression& a, const Expression& b) {
  return same_tree(*a.root_, *b.root_);
}

Expression parse(std::string_view text) {
  Parser parser(tokenize(text));
  return Expression(parser.parse_all());
}

double evaluate(const Expression& e, const Env& env) {
  std::vector<double> values;
  values.reserve(e.variables().size());
  for (const auto& name : e.variables()) {
    auto it = env.find(name);
    if (it == env.end()) throw EvalError("unbound variable '" + name + "'");
    values.push_back(it->second);
  }
  return e.evaluate(values);
}

Eigen::VectorXd grad_fd(const Expression& e, const Env& env,
                        const std::vector<std::string>& vars, std::optional<double> step) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(vars.size()));
  Env probe = env;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    auto it = probe.find(vars[k]);
    if (it == probe.end()) throw EvalError("unbound variable '" + vars[k] + "'");
    const double v = it->second;
    const double h = step ? *step : 1e-6 * std::max(1.0, std::fabs(v));
    const double up = v + h;
    const double down = v - h;
    it->second = up;
    const double fu = evaluate(e, probe);
    it->second = down;
    const double fd = evaluate(e, probe);
    it->second = v;
    g[static_cast<Eigen::Index>(k)] = (fu - fd) / (up - down);
  }
  return g;
}

}  // namespace bestapprox
