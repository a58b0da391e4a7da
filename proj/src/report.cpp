#include "bestapprox/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace bestapprox {

using nlohmann::json;

namespace {

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) a.push_back(v[j]);
  return a;
}

json witness_json(const std::optional<MixWitness>& w) {
  if (!w) return nullptr;
  return {{"u", vec_json(w->u)}, {"v", vec_json(w->v)}, {"t", w->t}, {"value", w->value},
          {"bound", w->bound}};
}

double round12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

void round_in_place(json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isnan(v)) {
      j = "nan";
    } else if (std::isinf(v)) {
      j = v > 0 ? "inf" : "-inf";
    } else {
      j = round12(v);
    }
  } else if (j.is_structured()) {
    for (auto& child : j) round_in_place(child);
  }
}

}  // namespace

json profile_json(const Profile& x) {
  json a = json::array();
  for (const auto& v : x) a.push_back(vec_json(v));
  return a;
}

Profile profile_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ModelError(ModelErrorCode::Schema, path, "expected an array of arrays");
  Profile x;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& row = j[i];
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!row.is_array()) throw ModelError(ModelErrorCode::Schema, p, "expected an array of numbers");
    Vec v(static_cast<Eigen::Index>(row.size()));
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!row[k].is_number()) {
        throw ModelError(ModelErrorCode::Schema, p + "[" + std::to_string(k) + "]", "expected a number");
      }
      v[static_cast<Eigen::Index>(k)] = row[k].get<double>();
    }
    x.push_back(std::move(v));
  }
  return x;
}

json to_json(const CertReport& rep) {
  json players = json::array();
  for (const auto& r : rep.players) {
    json p = {{"name", r.name},
              {"feas_X", r.feas_X},
              {"proj_residual", r.proj_residual},
              {"feas_F", r.feas_F},
              {"opt_residual", r.opt_residual}};
    if (!r.error.empty()) p["error"] = r.error;
    players.push_back(std::move(p));
  }
  return {{"players", players},
          {"aggregate", rep.aggregate},
          {"tol", rep.tol},
          {"pass", rep.pass},
          {"oracle_resolution", rep.oracle_resolution}};
}

json to_json(const SolveReport& rep, bool with_trace) {
  json j = {{"converged", rep.converged},
            {"x_tilde", profile_json(rep.solution.x_tilde)},
            {"y_tilde", profile_json(rep.solution.y_tilde)},
            {"residuals", to_json(rep.residuals)},
            {"iterations", rep.iterations},
            {"seed", rep.seed}};
  if (with_trace) {
    json trace = json::array();
    for (const auto& t : rep.trace) trace.push_back({{"x", profile_json(t.x)}, {"step", t.step}});
    j["trace"] = std::move(trace);
  }
  return j;
}

json to_json(const OracleResult& res) {
  json cands = json::array();
  for (const auto& c : res.candidates) {
    cands.push_back({{"x", profile_json(c.x)}, {"y_hat", profile_json(c.y_hat)}, {"residual", c.residual}});
  }
  return {{"resolution", res.resolution},
          {"spacing", res.spacing},
          {"match_tol", res.match_tol},
          {"evaluations", res.evaluations},
          {"skipped", res.skipped},
          {"candidates", cands}};
}

json to_json(const QuasiconcavityReport& rep) {
  return {{"check", "quasiconcave"},
          {"pass", rep.quasiconcave},
          {"counterexample", witness_json(rep.counterexample)},
          {"midpoint_concave", rep.midpoint_concave},
          {"concavity_counterexample", witness_json(rep.concavity_counterexample)},
          {"samples", rep.samples},
          {"evidence_only", rep.evidence_only}};
}

json to_json(const SemicontinuityReport& rep) {
  json radii = json::array();
  for (const auto& r : rep.radii) {
    json o = {{"radius", r.radius}, {"violated", r.violated}};
    if (r.witness_u) o["witness_u"] = vec_json(*r.witness_u);
    if (r.witness_v) o["witness_v"] = vec_json(*r.witness_v);
    if (r.witness_u && r.witness_v) o["witness_value"] = r.witness_value;
    radii.push_back(std::move(o));
  }
  return {{"pass", rep.pass},
          {"value_at_point", rep.value_at_point},
          {"radii", radii},
          {"evidence_only", rep.evidence_only}};
}

CandidateSolution load_candidate(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(ModelErrorCode::Schema, "", std::string("invalid JSON: ") + e.what());
  } catch (const json::out_of_range& e) {
    throw ModelError(ModelErrorCode::NonFinite, "", std::string("number out of range: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError(ModelErrorCode::Schema, "", "expected an object");
  for (const char* key : {"x_tilde", "y_tilde"}) {
    if (!doc.contains(key)) {
      throw ModelError(ModelErrorCode::Schema, "", std::string("missing field '") + key + "'");
    }
  }
  return {profile_from_json(doc["x_tilde"], "x_tilde"), profile_from_json(doc["y_tilde"], "y_tilde")};
}

std::string dump_report(const json& j) {
  json copy = j;
  round_in_place(copy);
  return copy.dump(2) + "\n";
}

}  // namespace bestapprox
