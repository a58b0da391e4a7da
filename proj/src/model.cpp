#include "bestapprox/model.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace bestapprox {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// ---------------------------------------------------------------------------
// JSON decoding with paths

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  throw ModelError(ModelErrorCode::Schema, path, msg);
}

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, std::string("missing field '") + key + "'");
  return *it;
}

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

Vec read_vec(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    v[static_cast<Eigen::Index>(k)] = read_number(j[k], path + "[" + std::to_string(k) + "]");
  }
  return v;
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

Expression read_expression(const json& j, const std::string& path) {
  const std::string text = read_string(j, path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw ModelError(ModelErrorCode::Syntax, path, e.what());
  }
}

std::vector<Expression> read_expressions(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of expression strings");
  std::vector<Expression> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(read_expression(j[k], path + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Box read_box(const json& j, const std::string& path) {
  return {read_vec(field(j, path, "lower"), path + ".lower"),
          read_vec(field(j, path, "upper"), path + ".upper")};
}

ConvexSet read_set(const json& j, const std::string& path) {
  const std::string type = read_string(field(j, path, "type"), path + ".type");
  if (type == "box") return read_box(j, path);
  if (type == "ball") {
    return Ball{read_vec(field(j, path, "center"), path + ".center"),
                read_number(field(j, path, "radius"), path + ".radius")};
  }
  if (type == "polytope") {
    Polytope poly{read_box(j, path), {}};
    if (auto it = j.find("halfspaces"); it != j.end()) {
      const std::string hpath = path + ".halfspaces";
      if (!it->is_array()) schema_error(hpath, "expected an array");
      for (std::size_t k = 0; k < it->size(); ++k) {
        const std::string p = hpath + "[" + std::to_string(k) + "]";
        const json& h = (*it)[k];
        poly.halfspaces.push_back({read_vec(field(h, p, "normal"), p + ".normal"),
                                   read_number(field(h, p, "offset"), p + ".offset")});
      }
    }
    return poly;
  }
  schema_error(path + ".type", "unknown set type '" + type + "' (expected box, ball or polytope)");
}

ConstraintMapSpec read_map(const json& j, const std::string& path) {
  const std::string type = read_string(field(j, path, "type"), path + ".type");
  if (type == "translate") {
    return TranslateMap{read_expressions(field(j, path, "shift"), path + ".shift"),
                        read_set(field(j, path, "base"), path + ".base")};
  }
  if (type == "param_box") {
    return ParamBoxMap{read_expressions(field(j, path, "lower"), path + ".lower"),
                       read_expressions(field(j, path, "upper"), path + ".upper")};
  }
  schema_error(path + ".type",
               "unknown constraint map type '" + type + "' (expected translate or param_box)");
}

PlayerSpec read_player(const json& j, const std::string& path) {
  PlayerSpec p;
  p.name = read_string(field(j, path, "name"), path + ".name");
  const json& d = field(j, path, "dim");
  if (!d.is_number_integer()) schema_error(path + ".dim", "expected an integer");
  p.dim = d.get<int>();
  p.strategy_set = read_set(field(j, path, "strategy_set"), path + ".strategy_set");
  p.seminorm.weights =
      read_vec(field(field(j, path, "seminorm"), path + ".seminorm", "weights"),
               path + ".seminorm.weights");
  p.objective = read_expression(field(j, path, "objective"), path + ".objective");
  p.constraint_map = read_map(field(j, path, "constraint_map"), path + ".constraint_map");
  return p;
}

// ---------------------------------------------------------------------------
// JSON encoding

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) a.push_back(v[j]);
  return a;
}

json box_fields(const Box& b) { return {{"lower", vec_json(b.lower)}, {"upper", vec_json(b.upper)}}; }

json set_json(const ConvexSet& s) {
  return std::visit(Overloaded{[](const Box& b) {
                                 json j = box_fields(b);
                                 j["type"] = "box";
                                 return j;
                               },
                               [](const Ball& b) {
                                 return json{{"type", "ball"},
                                             {"center", vec_json(b.center)},
                                             {"radius", b.radius}};
                               },
                               [](const Polytope& p) {
                                 json j = box_fields(p.box);
                                 j["type"] = "polytope";
                                 json hs = json::array();
                                 for (const auto& h : p.halfspaces) {
                                   hs.push_back({{"normal", vec_json(h.normal)}, {"offset", h.offset}});
                                 }
                                 j["halfspaces"] = hs;
                                 return j;
                               }},
                    s);
}

json exprs_json(const std::vector<Expression>& es) {
  json a = json::array();
  for (const auto& e : es) a.push_back(print(e));
  return a;
}

json map_json(const ConstraintMapSpec& m) {
  return std::visit(Overloaded{[](const TranslateMap& t) {
                                 return json{{"type", "translate"},
                                             {"shift", exprs_json(t.shift)},
                                             {"base", set_json(t.base)}};
                               },
                               [](const ParamBoxMap& b) {
                                 return json{{"type", "param_box"},
                                             {"lower", exprs_json(b.lower)},
                                             {"upper", exprs_json(b.upper)}};
                               }},
                    m);
}

// ---------------------------------------------------------------------------
// Validation

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  auto start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  if (!start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) {
    return start(c) || std::isdigit(static_cast<unsigned char>(c));
  });
}

class Validator {
 public:
  explicit Validator(const GameInstance& inst) : inst_(inst) {}

  std::vector<Diagnostic> run() {
    if (inst_.players.empty()) error(ModelErrorCode::Schema, "players", "at least one player required");
    if (inst_.kind == ProblemKind::Quopt && inst_.players.size() != 1) {
      error(ModelErrorCode::Schema, "players", "quopt requires exactly one player");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < inst_.players.size(); ++i) {
      const std::string path = "players[" + std::to_string(i) + "]";
      const auto& p = inst_.players[i];
      if (!is_identifier(p.name)) error(ModelErrorCode::Invalid, path + ".name", "invalid player name");
      if (!names.insert(p.name).second) {
        error(ModelErrorCode::Invalid, path + ".name", "duplicate player name '" + p.name + "'");
      }
      check_player(i, path);
    }
    return std::move(diags_);
  }

 private:
  void error(ModelErrorCode code, std::string loc, std::string msg) {
    diags_.push_back({Diagnostic::Severity::Error, code, std::move(loc), std::move(msg)});
  }
  void warning(ModelErrorCode code, std::string loc, std::string msg) {
    diags_.push_back({Diagnostic::Severity::Warning, code, std::move(loc), std::move(msg)});
  }

  void check_set(const ConvexSet& s, Eigen::Index d, const std::string& path) {
    if (dim(s) != d) {
      error(ModelErrorCode::Dimension, path,
            "dimension " + std::to_string(dim(s)) + " does not match player dim " + std::to_string(d));
      return;
    }
    std::string msg = bestapprox::check_set(s);
    if (!msg.empty()) {
      const bool nonfinite = msg.find("finite") != std::string::npos;
      error(nonfinite ? ModelErrorCode::NonFinite : ModelErrorCode::Invalid, path, msg);
    }
  }

  // Variables allowed in a constraint map or objective of player i.
  void check_scope(const Expression& e, std::size_t i, bool allow_own_z, const std::string& path) {
    const bool quopt = inst_.kind == ProblemKind::Quopt;
    const int dim_i = inst_.players[i].dim;
    for (const auto& name : e.variables()) {
      auto ref = parse_variable(name);
      if (!ref) {
        error(ModelErrorCode::Scope, path, "unknown variable '" + name + "'");
        continue;
      }
      if (ref->player == VarRef::kOwn) {
        if (!allow_own_z) {
          error(ModelErrorCode::Scope, path,
                "scope violation: own variable '" + name + "' inside a constraint map");
        } else if (ref->coord >= dim_i) {
          error(ModelErrorCode::Dimension, path, "variable '" + name + "' exceeds player dim");
        }
        continue;
      }
      const auto k = static_cast<std::size_t>(ref->player);
      if (k >= inst_.players.size()) {
        error(ModelErrorCode::Scope, path, "variable '" + name + "' refers to an unknown player");
        continue;
      }
      if (ref->coord >= inst_.players[k].dim) {
        error(ModelErrorCode::Dimension, path, "variable '" + name + "' exceeds that player's dim");
        continue;
      }
      if (allow_own_z && quopt) {
        error(ModelErrorCode::Scope, path,
              "scope violation: quopt objective may use only z variables, found '" + name + "'");
      } else if (k == i && !quopt) {
        error(ModelErrorCode::Scope, path,
              "scope violation: '" + name + "' is the player's own public strategy");
      }
    }
  }

  void check_player(std::size_t i, const std::string& path) {
    const auto& p = inst_.players[i];
    if (p.dim <= 0) {
      error(ModelErrorCode::Dimension, path + ".dim", "dim must be positive");
      return;
    }
    const Eigen::Index d = p.dim;
    check_set(p.strategy_set, d, path + ".strategy_set");

    const std::string wpath = path + ".seminorm.weights";
    if (p.seminorm.dim() != d) {
      error(ModelErrorCode::Dimension, wpath, "dimension does not match player dim");
    } else if (!p.seminorm.weights.allFinite()) {
      error(ModelErrorCode::NonFinite, wpath, "weights must be finite");
    } else if (p.seminorm.weights.minCoeff() < 0) {
      error(ModelErrorCode::Invalid, wpath, "weights must be nonnegative");
    } else if (!p.seminorm.is_norm() && !std::holds_alternative<Box>(p.strategy_set)) {
      error(ModelErrorCode::Invalid, wpath,
            "zero weights are supported only with a box strategy set");
    }

    check_scope(p.objective, i, true, path + ".objective");
    bool uses_own = false;
    for (const auto& name : p.objective.variables()) {
      auto ref = parse_variable(name);
      uses_own = uses_own || (ref && ref->player == VarRef::kOwn);
    }
    if (!uses_own) {
      warning(ModelErrorCode::Invalid, path + ".objective",
              "objective does not depend on the player's own variables");
    }

    const std::string mpath = path + ".constraint_map";
    std::visit(Overloaded{[&](const TranslateMap& t) {
                            if (static_cast<Eigen::Index>(t.shift.size()) != d) {
                              error(ModelErrorCode::Dimension, mpath + ".shift",
                                    "shift length does not match player dim");
                            }
                            for (std::size_t k = 0; k < t.shift.size(); ++k) {
                              check_scope(t.shift[k], i, false,
                                          mpath + ".shift[" + std::to_string(k) + "]");
                            }
                            check_set(t.base, d, mpath + ".base");
                          },
                          [&](const ParamBoxMap& b) {
                            if (static_cast<Eigen::Index>(b.lower.size()) != d ||
                                static_cast<Eigen::Index>(b.upper.size()) != d) {
                              error(ModelErrorCode::Dimension, mpath,
                                    "bound lengths do not match player dim");
                            }
                            for (std::size_t k = 0; k < b.lower.size(); ++k) {
                              check_scope(b.lower[k], i, false,
                                          mpath + ".lower[" + std::to_string(k) + "]");
                            }
                            for (std::size_t k = 0; k < b.upper.size(); ++k) {
                              check_scope(b.upper[k], i, false,
                                          mpath + ".upper[" + std::to_string(k) + "]");
                            }
                          }},
               p.constraint_map);
  }

  const GameInstance& inst_;
  std::vector<Diagnostic> diags_;
};

bool same_vec(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (std::bit_cast<std::uint64_t>(a[j]) != std::bit_cast<std::uint64_t>(b[j])) return false;
  }
  return true;
}

bool same_set(const ConvexSet& a, const ConvexSet& b) {
  if (a.index() != b.index()) return false;
  if (auto* x = std::get_if<Box>(&a)) {
    const auto& y = std::get<Box>(b);
    return same_vec(x->lower, y.lower) && same_vec(x->upper, y.upper);
  }
  if (auto* x = std::get_if<Ball>(&a)) {
    const auto& y = std::get<Ball>(b);
    return same_vec(x->center, y.center) && x->radius == y.radius;
  }
  const auto& x = std::get<Polytope>(a);
  const auto& y = std::get<Polytope>(b);
  if (!same_set(x.box, y.box) || x.halfspaces.size() != y.halfspaces.size()) return false;
  for (std::size_t k = 0; k < x.halfspaces.size(); ++k) {
    if (!same_vec(x.halfspaces[k].normal, y.halfspaces[k].normal) ||
        x.halfspaces[k].offset != y.halfspaces[k].offset) {
      return false;
    }
  }
  return true;
}

bool same_exprs(const std::vector<Expression>& a, const std::vector<Expression>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

bool same_map(const ConstraintMapSpec& a, const ConstraintMapSpec& b) {
  if (a.index() != b.index()) return false;
  if (auto* x = std::get_if<TranslateMap>(&a)) {
    const auto& y = std::get<TranslateMap>(b);
    return same_exprs(x->shift, y.shift) && same_set(x->base, y.base);
  }
  const auto& x = std::get<ParamBoxMap>(a);
  const auto& y = std::get<ParamBoxMap>(b);
  return same_exprs(x.lower, y.lower) && same_exprs(x.upper, y.upper);
}

Vec eval_all(const std::vector<Expression>& es, const std::function<double(const Expression&)>& f) {
  Vec v(static_cast<Eigen::Index>(es.size()));
  for (std::size_t k = 0; k < es.size(); ++k) v[static_cast<Eigen::Index>(k)] = f(es[k]);
  return v;
}

RealizedSet realize_with(const ConstraintMapSpec& spec,
                         const std::function<double(const Expression&)>& eval) {
  return std::visit(
      Overloaded{[&](const TranslateMap& t) {
                   Vec shift = eval_all(t.shift, eval);
                   if (!shift.allFinite()) throw RealizationError("non-finite shift " + format_vec(shift));
                   return RealizedSet{std::move(shift), t.base};
                 },
                 [&](const ParamBoxMap& b) {
                   Vec lo = eval_all(b.lower, eval);
                   Vec hi = eval_all(b.upper, eval);
                   if (!lo.allFinite() || !hi.allFinite()) {
                     throw RealizationError("non-finite bounds " + format_vec(lo) + ", " + format_vec(hi));
                   }
                   for (Eigen::Index j = 0; j < lo.size(); ++j) {
                     if (lo[j] > hi[j]) {
                       throw EmptyConstraintError("empty constraint set: lower " + format_vec(lo) +
                                                  " exceeds upper " + format_vec(hi) +
                                                  " at coordinate " + std::to_string(j + 1));
                     }
                   }
                   return RealizedSet{Vec::Zero(lo.size()), Box{std::move(lo), std::move(hi)}};
                 }},
      spec);
}

int parse_index(std::string_view s) {
  if (s.empty() || s.size() > 6) return -1;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 1) return -1;
  return v;
}

}  // namespace

std::optional<VarRef> parse_variable(std::string_view name) {
  if (name.size() > 2 && name[0] == 'z' && name[1] == '_') {
    const int j = parse_index(name.substr(2));
    if (j < 0) return std::nullopt;
    return VarRef{VarRef::kOwn, j - 1};
  }
  if (name.size() > 3 && name[0] == 'x') {
    const auto us = name.find('_');
    if (us == std::string_view::npos) return std::nullopt;
    const int k = parse_index(name.substr(1, us - 1));
    const int j = parse_index(name.substr(us + 1));
    if (k < 0 || j < 0) return std::nullopt;
    return VarRef{k - 1, j - 1};
  }
  return std::nullopt;
}

BoundExpression::BoundExpression(Expression e) : expr_(std::move(e)) {
  for (const auto& name : expr_.variables()) {
    auto ref = parse_variable(name);
    if (!ref) throw EvalError("unknown variable '" + name + "'");
    refs_.push_back(*ref);
  }
}

double BoundExpression::operator()(const Profile& x, const Vec& z) const {
  std::array<double, 16> small{};
  std::vector<double> large;
  double* values = small.data();
  if (refs_.size() > small.size()) {
    large.resize(refs_.size());
    values = large.data();
  }
  for (std::size_t k = 0; k < refs_.size(); ++k) {
    const VarRef& r = refs_[k];
    const Vec& src = r.player == VarRef::kOwn ? z : x.at(static_cast<std::size_t>(r.player));
    if (r.coord >= src.size()) {
      throw EvalError("variable '" + expr_.variables()[k] + "' has no value");
    }
    values[k] = src[r.coord];
  }
  return expr_.evaluate(std::span<const double>(values, refs_.size()));
}

GameInstance load_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(ModelErrorCode::Schema, "", std::string("invalid JSON: ") + e.what());
  } catch (const json::out_of_range& e) {
    // e.g. a literal like 1e400
    throw ModelError(ModelErrorCode::NonFinite, "", std::string("number out of range: ") + e.what());
  }
  GameInstance inst;
  const std::string kind = read_string(field(doc, "", "kind"), "kind");
  if (kind == "gnep") {
    inst.kind = ProblemKind::Gnep;
  } else if (kind == "quopt") {
    inst.kind = ProblemKind::Quopt;
  } else {
    schema_error("kind", "expected 'gnep' or 'quopt'");
  }
  if (auto it = doc.find("metadata"); it != doc.end()) {
    if (!it->is_object()) schema_error("metadata", "expected an object");
    inst.metadata = *it;
  }
  const json& players = field(doc, "", "players");
  if (!players.is_array()) schema_error("players", "expected an array");
  for (std::size_t i = 0; i < players.size(); ++i) {
    inst.players.push_back(read_player(players[i], "players[" + std::to_string(i) + "]"));
  }
  for (const auto& d : validate(inst)) {
    if (d.severity == Diagnostic::Severity::Error) throw ModelError(d.code, d.location, d.message);
  }
  return inst;
}

json to_json(const GameInstance& inst) {
  json players = json::array();
  for (const auto& p : inst.players) {
    players.push_back({{"name", p.name},
                       {"dim", p.dim},
                       {"strategy_set", set_json(p.strategy_set)},
                       {"seminorm", {{"weights", vec_json(p.seminorm.weights)}}},
                       {"objective", print(p.objective)},
                       {"constraint_map", map_json(p.constraint_map)}});
  }
  return {{"kind", inst.kind == ProblemKind::Gnep ? "gnep" : "quopt"},
          {"metadata", inst.metadata},
          {"players", players}};
}

std::string serialize(const GameInstance& inst) { return to_json(inst).dump(2) + "\n"; }

std::vector<Diagnostic> validate(const GameInstance& inst) { return Validator(inst).run(); }

bool same_instance(const GameInstance& a, const GameInstance& b) {
  if (a.kind != b.kind || a.metadata != b.metadata || a.players.size() != b.players.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.players.size(); ++i) {
    const auto& p = a.players[i];
    const auto& q = b.players[i];
    if (p.name != q.name || p.dim != q.dim || !same_set(p.strategy_set, q.strategy_set) ||
        !same_vec(p.seminorm.weights, q.seminorm.weights) || !(p.objective == q.objective) ||
        !same_map(p.constraint_map, q.constraint_map)) {
      return false;
    }
  }
  return true;
}

RealizedSet realize_constraint(const GameInstance& inst, std::size_t player, const Profile& x) {
  const auto& p = inst.players.at(player);
  const Vec none;
  try {
    return realize_with(p.constraint_map,
                        [&](const Expression& e) { return BoundExpression(e)(x, none); });
  } catch (const EmptyConstraintError& e) {
    throw EmptyConstraintError("player " + p.name + ": " + e.what() + " at x = " + format_profile(x));
  } catch (const Error& e) {
    throw RealizationError("player " + p.name + ": cannot realize constraint map at x = " +
                           format_profile(x) + ": " + e.what());
  }
}

RealizedSet realize_map(const ConstraintMapSpec& spec, const Env& env) {
  try {
    return realize_with(spec, [&](const Expression& e) { return evaluate(e, env); });
  } catch (const EmptyConstraintError&) {
    throw;
  } catch (const Error& e) {
    throw RealizationError(std::string("cannot realize constraint map: ") + e.what());
  }
}

double objective_value(const GameInstance& inst, std::size_t player, const Profile& x,
                       const Vec& z) {
  return BoundExpression(inst.players.at(player).objective)(x, z);
}

Eigen::Index map_dim(const ConstraintMapSpec& spec) {
  return std::visit(Overloaded{[](const TranslateMap& t) { return static_cast<Eigen::Index>(t.shift.size()); },
                               [](const ParamBoxMap& b) { return static_cast<Eigen::Index>(b.lower.size()); }},
                    spec);
}

std::string format_vec(const Vec& v) {
  std::ostringstream os;
  os.precision(10);
  os << '(';
  for (Eigen::Index j = 0; j < v.size(); ++j) os << (j ? ", " : "") << v[j];
  os << ')';
  return os.str();
}

std::string format_profile(const Profile& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + format_vec(x[i]);
  return s + ")";
}

}  // namespace bestapprox
