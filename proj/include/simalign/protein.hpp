#pragma once

// Secondary-structure elements (strands, helices) as Calpha clouds, and their
// reduction to one 3-d vector per element.
//
// Fixture format, one row per Calpha, optional header line:
//   element_index,kind,res_seq,x,y,z
// kind is strand|helix (E|H accepted). Rows of one element are contiguous.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "simalign/core.hpp"

namespace simalign {

enum class SseKind { strand, helix };

struct SSERecord {
    int element_index{0};
    SseKind kind{SseKind::strand};
    std::vector<int> res_seq;
    std::vector<Vector> residues;  // Calpha coordinates in angstroms, in chain order

    void validate() const;
};

const char* to_string(SseKind kind);

/// Vector between the projections of the first and last Calpha onto the
/// principal axis of the cloud. Throws DegenerateElement for coincident
/// points or a tied leading eigenvalue.
Vector principal_axis_vector(const SSERecord& sse);

Configuration configuration_from_sses(const std::vector<SSERecord>& domain, const std::string& id);

std::vector<SSERecord> parse_sse_file(std::istream& in, const std::string& source = "<stream>");
std::vector<SSERecord> parse_sse_file(const std::filesystem::path& path);

void write_sse_file(std::ostream& out, const std::vector<SSERecord>& records);

}  // namespace simalign
