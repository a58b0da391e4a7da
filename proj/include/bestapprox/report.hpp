#pragma once

#include <string>

#include "bestapprox/certify.hpp"
#include "bestapprox/diagnostics.hpp"
#include "bestapprox/oracle.hpp"
#include "bestapprox/solver.hpp"
#include "json.hpp"

namespace bestapprox {

nlohmann::json profile_json(const Profile& x);
/// Throws ModelError (schema) unless j is an array of number arrays.
Profile profile_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json to_json(const CertReport& rep);
/// {"converged", "x_tilde", "y_tilde", "residuals", "iterations", "seed"}
/// plus "trace" when requested.
nlohmann::json to_json(const SolveReport& rep, bool with_trace = false);
nlohmann::json to_json(const OracleResult& res);
nlohmann::json to_json(const QuasiconcavityReport& rep);
nlohmann::json to_json(const SemicontinuityReport& rep);

/// Reads {"x_tilde": [[...]], "y_tilde": [[...]]}.
CandidateSolution load_candidate(std::string_view text);

/// Rounds every number to 12 significant digits and pretty-prints, so
/// reports compare byte-for-byte across runs. Non-finite numbers become the
/// strings "inf", "-inf" or "nan".
std::string dump_report(const nlohmann::json& j);

}  // namespace bestapprox
