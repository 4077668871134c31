#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "simalign/core.hpp"

namespace simalign {

/// Configuration CSV: header `id,seq,group,x,y[,z]`, one row per point.
/// seq and group may be left empty (for every row, or for none).
Configuration read_configuration_csv(std::istream& in, const std::string& source = "<stream>");
Configuration read_configuration_csv(const std::filesystem::path& path);

void write_configuration_csv(std::ostream& out, const Configuration& cfg);
void write_configuration_csv(const std::filesystem::path& path, const Configuration& cfg);

}  // namespace simalign
