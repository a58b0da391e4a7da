#pragma once

#include <Eigen/Core>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bestapprox {

/// Variable bindings used by the map-based evaluation entry points.
using Env = std::map<std::string, double, std::less<>>;

/// Immutable arithmetic expression over named real variables.
///
/// Grammar, loosest binding first: `+ -` (left), `* /` (left), unary minus,
/// `^` (right-associative), then literals, identifiers, parenthesized
/// expressions and the calls `sqrt abs exp log` (one argument) and `min max`
/// (two arguments).
class Expression {
 public:
  enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
  enum class Func { Sqrt, Abs, Exp, Log, Min, Max };

  struct Node {
    Kind kind = Kind::Number;
    double value = 0.0;           // Number
    std::string name;             // Variable
    Func func = Func::Sqrt;       // Call
    std::vector<std::shared_ptr<const Node>> args;
  };
  using NodePtr = std::shared_ptr<const Node>;

  Expression();  // the literal 0
  static Expression constant(double value);

  /// Sorted, de-duplicated variable names; the order of the value span taken
  /// by the span overload of evaluate().
  const std::vector<std::string>& variables() const { return variables_; }
  bool uses(std::string_view name) const;
  bool is_constant() const { return variables_.empty(); }

  /// Evaluates with `values[k]` bound to `variables()[k]`.
  double evaluate(std::span<const double> values) const;

  /// Returns a copy with the variables bound in `values` replaced by literals.
  Expression substitute(const Env& values) const;

  /// Returns a copy with every variable renamed through `rename`.
  Expression rename(const std::function<std::string(const std::string&)>& rename) const;

  const Node& root() const { return *root_; }
  std::string to_string() const;

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  friend Expression parse(std::string_view text);
  explicit Expression(NodePtr root);

  NodePtr root_;
  std::vector<std::string> variables_;
};

/// Parses `text`. Throws ParseError carrying the byte offset of the
/// offending token (for premature end of input: the last token read).
Expression parse(std::string_view text);

/// Shortest text that parses back to a structurally identical tree.
inline std::string print(const Expression& e) { return e.to_string(); }

/// Throws EvalError for unbound variables and domain errors.
double evaluate(const Expression& e, const Env& env);

/// Central finite differences of `e` with respect to `vars` at `env`.
/// The default step for variable v is 1e-6 * max(1, |v|).
Eigen::VectorXd grad_fd(const Expression& e, const Env& env,
                        const std::vector<std::string>& vars,
                        std::optional<double> step = std::nullopt);

}  // namespace bestapprox
