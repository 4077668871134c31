#pragma once

// Command-line front end. `run_cli` is the whole program minus main(), so the
// tests can drive it in-process.
//
// Exit codes: 0 success, 2 validation or parse error, 3 numerical failure.

#include <iosfwd>
#include <string>
#include <vector>

#include "simalign/model.hpp"
#include "simalign/sampler.hpp"

namespace simalign {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

/// Flag names (without "--") that set PriorSpec and ChainSettings fields.
const std::vector<std::string>& prior_flag_names();
const std::vector<std::string>& chain_flag_names();

/// Applies one key=value pair; throws InvalidArgument on an unknown key or bad value.
/// Boolean keys accept true/false/1/0. "mu-tau" accepts "auto", which is left
/// for the caller to resolve (returns true in that case).
bool apply_prior_setting(PriorSpec& priors, const std::string& key, const std::string& value);
void apply_chain_setting(ChainSettings& settings, const std::string& key, const std::string& value);

/// Reads a key=value file ('#' comments, blank lines allowed) into ordered pairs.
std::vector<std::pair<std::string, std::string>> read_settings_file(const std::string& path);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace simalign
