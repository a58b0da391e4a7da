#include "bestapprox/catalog.hpp"

#include <array>
#include <utility>

namespace bestapprox {

namespace {

// Two players on X = Y = {z in [0,1]^2 : z_1 + z_2 >= 1}. Player 1's feasible
// set is the unit box translated by 2 y/|y|, player 2's by sqrt(2) x/|x|;
// neither ever meets X, so no classical equilibrium exists.
constexpr const char* kTwoPlayerGame = R"json({
  "kind": "gnep",
  "metadata": {
    "name": "paper-gnep",
    "description": "Two-player game with non-self constraint maps; best approximate solution ((1,1),(1,1))"
  },
  "players": [
    {
      "name": "P1",
      "dim": 2,
      "strategy_set": {"type": "polytope", "lower": [0, 0], "upper": [1, 1],
                       "halfspaces": [{"normal": [-1, -1], "offset": -1}]},
      "seminorm": {"weights": [1, 1]},
      "objective": "2*z_1 + 2*z_2 + 3*x2_2",
      "constraint_map": {
        "type": "translate",
        "shift": ["2*x2_1/sqrt(x2_1^2 + x2_2^2)", "2*x2_2/sqrt(x2_1^2 + x2_2^2)"],
        "base": {"type": "box", "lower": [0, 0], "upper": [1, 1]}
      }
    },
    {
      "name": "P2",
      "dim": 2,
      "strategy_set": {"type": "polytope", "lower": [0, 0], "upper": [1, 1],
                       "halfspaces": [{"normal": [-1, -1], "offset": -1}]},
      "seminorm": {"weights": [1, 1]},
      "objective": "2*x1_1 + z_1 + z_2",
      "constraint_map": {
        "type": "translate",
        "shift": ["sqrt(2)*x1_1/sqrt(x1_1^2 + x1_2^2)", "sqrt(2)*x1_2/sqrt(x1_1^2 + x1_2^2)"],
        "base": {"type": "box", "lower": [0, 0], "upper": [1, 1]}
      }
    }
  ]
}
)json";

constexpr const char* kQuoptExample = R"json({
  "kind": "quopt",
  "metadata": {
    "name": "paper-quopt",
    "description": "Quasi-optimization with K(u) = 2u/|u| + [0,1]^2 over U = {u in [0,1]^2 : u_1 + u_2 >= 1}"
  },
  "players": [
    {
      "name": "U",
      "dim": 2,
      "strategy_set": {"type": "polytope", "lower": [0, 0], "upper": [1, 1],
                       "halfspaces": [{"normal": [-1, -1], "offset": -1}]},
      "seminorm": {"weights": [1, 1]},
      "objective": "z_1 + z_2",
      "constraint_map": {
        "type": "translate",
        "shift": ["2*x1_1/sqrt(x1_1^2 + x1_2^2)", "2*x1_2/sqrt(x1_1^2 + x1_2^2)"],
        "base": {"type": "box", "lower": [0, 0], "upper": [1, 1]}
      }
    }
  ]
}
)json";

constexpr const char* kSelfmapBox = R"json({
  "kind": "gnep",
  "metadata": {
    "name": "selfmap-box",
    "description": "Self constraint maps F_i(x_{-i}) = [0, x_{-i}] on X_i = [0,1] with u_i = z_1; every diagonal point is an equilibrium. Iterate with damping 0.5."
  },
  "players": [
    {
      "name": "A",
      "dim": 1,
      "strategy_set": {"type": "box", "lower": [0], "upper": [1]},
      "seminorm": {"weights": [1]},
      "objective": "z_1",
      "constraint_map": {"type": "param_box", "lower": ["0"], "upper": ["x2_1"]}
    },
    {
      "name": "B",
      "dim": 1,
      "strategy_set": {"type": "box", "lower": [0], "upper": [1]},
      "seminorm": {"weights": [1]},
      "objective": "z_1",
      "constraint_map": {"type": "param_box", "lower": ["0"], "upper": ["x1_1"]}
    }
  ]
}
)json";

// f(u, v) = 1 if v = u else 0, with K(0) = [-10, 10] (truncated real line)
// and K(u) = {u} otherwise. Player V's objective and map read u = x2_1.
constexpr const char* kFptExample = R"json({
  "kind": "gnep",
  "metadata": {
    "name": "fpt-example",
    "description": "Indicator f(u,v) = [v = u] with K(0) = [-10,10], K(u) = {u} for u != 0: FPT l.s.c. in u but not l.s.c. at (0,0)"
  },
  "players": [
    {
      "name": "V",
      "dim": 1,
      "strategy_set": {"type": "box", "lower": [-10], "upper": [10]},
      "seminorm": {"weights": [1]},
      "objective": "1 - min(1, abs(z_1 - x2_1)*1e300)",
      "constraint_map": {
        "type": "param_box",
        "lower": ["x2_1 - 10*(1 - min(1, abs(x2_1)*1e300))"],
        "upper": ["x2_1 + 10*(1 - min(1, abs(x2_1)*1e300))"]
      }
    },
    {
      "name": "U",
      "dim": 1,
      "strategy_set": {"type": "box", "lower": [0], "upper": [1]},
      "seminorm": {"weights": [1]},
      "objective": "0",
      "constraint_map": {"type": "param_box", "lower": ["0"], "upper": ["1"]}
    }
  ]
}
)json";

constexpr const char* kCubeQuasiconcave = R"json({
  "kind": "quopt",
  "metadata": {
    "name": "cube-quasiconcave",
    "description": "f(z) = z^3 on [-1,1]: quasi-concave but not concave"
  },
  "players": [
    {
      "name": "U",
      "dim": 1,
      "strategy_set": {"type": "box", "lower": [-1], "upper": [1]},
      "seminorm": {"weights": [1]},
      "objective": "z_1^3",
      "constraint_map": {"type": "param_box", "lower": ["-1"], "upper": ["1"]}
    }
  ]
}
)json";

constexpr std::array<std::pair<const char*, const char*>, 5> kRegistry = {{
    {"paper-gnep", kTwoPlayerGame},
    {"paper-quopt", kQuoptExample},
    {"selfmap-box", kSelfmapBox},
    {"fpt-example", kFptExample},
    {"cube-quasiconcave", kCubeQuasiconcave},
}};

}  // namespace

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : kRegistry) out.emplace_back(name);
  return out;
}

std::optional<std::string> catalog_instance(std::string_view name) {
  for (const auto& [n, text] : kRegistry) {
    if (name == n) return std::string(text);
  }
  return std::nullopt;
}

}  // namespace bestapprox
