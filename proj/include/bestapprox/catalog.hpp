#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bestapprox {

/// Names of the bundled instances, in registry order.
std::vector<std::string> catalog_names();

/// Instance-file text of a bundled instance, or nullopt for unknown names.
std::optional<std::string> catalog_instance(std::string_view name);

}  // namespace bestapprox
