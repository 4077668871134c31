#pragma once

// Plain-text trace of retained draws, and the JSON summary.
//
// Trace layout: a comment line "# simalign-trace key=value ..." carrying the
// problem shape and acceptance counters, a CSV header, then one row per draw.
// Reading a trace back reproduces the ChainOutput bit for bit.

#include <filesystem>
#include <iosfwd>

#include "json.hpp"

#include "simalign/sampler.hpp"

namespace simalign {

void write_trace(std::ostream& out, const ChainOutput& output);
void write_trace(const std::filesystem::path& path, const ChainOutput& output);

/// Throws ParseError on malformed input.
ChainOutput read_trace(std::istream& in, const std::string& source = "<stream>");
ChainOutput read_trace(const std::filesystem::path& path);

nlohmann::json summary_to_json(const PosteriorSummary& summary);

}  // namespace simalign
