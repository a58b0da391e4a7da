#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bestapprox/error.hpp"
#include "bestapprox/expr.hpp"
#include "bestapprox/geometry.hpp"
#include "json.hpp"

namespace bestapprox {

/// One vector per player, in instance order.
using Profile = std::vector<Vec>;

/// F_i(x_{-i}) = shift(x_{-i}) + base.
struct TranslateMap {
  std::vector<Expression> shift;
  ConvexSet base;
};

/// F_i(x_{-i}) = [lower(x_{-i}), upper(x_{-i})].
struct ParamBoxMap {
  std::vector<Expression> lower;
  std::vector<Expression> upper;
};

using ConstraintMapSpec = std::variant<TranslateMap, ParamBoxMap>;

struct PlayerSpec {
  std::string name;
  int dim = 0;
  ConvexSet strategy_set;  // X_i
  SemiNorm seminorm;       // p_i
  Expression objective;    // u_i over rival x{k}_{j} and own z_{j}
  ConstraintMapSpec constraint_map;
};

enum class ProblemKind { Gnep, Quopt };

struct GameInstance {
  ProblemKind kind = ProblemKind::Gnep;
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<PlayerSpec> players;

  std::string name() const { return metadata.value("name", std::string()); }
};

/// The pair (x~, y~): projected profile and auxiliary best-response profile.
struct CandidateSolution {
  Profile x_tilde;
  Profile y_tilde;
};

enum class ModelErrorCode { Schema, Syntax, Scope, Dimension, NonFinite, Invalid };

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  ModelErrorCode code = ModelErrorCode::Invalid;
  std::string location;  // JSON-style path, e.g. players[0].seminorm.weights
  std::string message;
};

class ModelError : public Error {
 public:
  ModelError(ModelErrorCode code, std::string path, const std::string& message)
      : Error((path.empty() ? std::string() : path + ": ") + message),
        code_(code),
        path_(std::move(path)) {}
  ModelErrorCode code() const { return code_; }
  const std::string& path() const { return path_; }

 private:
  ModelErrorCode code_;
  std::string path_;
};

/// A parsed variable reference. Public strategies `x{k}_{j}` have player k-1;
/// the evaluating player's own decision variables `z_{j}` have player == kOwn.
struct VarRef {
  static constexpr int kOwn = -1;
  int player = kOwn;
  int coord = 0;  // zero-based
};

std::optional<VarRef> parse_variable(std::string_view name);

/// An expression with its variables resolved against (profile, own vector).
class BoundExpression {
 public:
  BoundExpression() = default;
  explicit BoundExpression(Expression e);

  double operator()(const Profile& x, const Vec& z) const;
  const Expression& expression() const { return expr_; }

 private:
  Expression expr_;
  std::vector<VarRef> refs_;
};

/// Parses and validates an instance file. Throws ModelError.
GameInstance load_instance(std::string_view text);

nlohmann::json to_json(const GameInstance& inst);
std::string serialize(const GameInstance& inst);

/// All invariant violations; empty iff the instance is well formed.
std::vector<Diagnostic> validate(const GameInstance& inst);

/// Structural equality (bitwise on numbers, tree equality on expressions).
bool same_instance(const GameInstance& a, const GameInstance& b);

/// F_i evaluated at the rival strategies read from the full profile `x`
/// (player i's own entry is ignored for gnep; for quopt it is the point u of
/// K(u)). ParamBox maps realize with a zero shift.
RealizedSet realize_constraint(const GameInstance& inst, std::size_t player, const Profile& x);

/// Realizes a map whose expressions are evaluated against named bindings.
RealizedSet realize_map(const ConstraintMapSpec& spec, const Env& env);

/// u_i(x_{-i}, z).
double objective_value(const GameInstance& inst, std::size_t player, const Profile& x,
                       const Vec& z);

/// Dimension of the map's realized sets.
Eigen::Index map_dim(const ConstraintMapSpec& spec);

std::string format_vec(const Vec& v);
std::string format_profile(const Profile& x);

}  // namespace bestapprox
