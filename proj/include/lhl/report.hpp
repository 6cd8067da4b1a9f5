// Serialized forms: traceroute JSONL, the long-haul link CSV, the candidate
// cache, and generic headered CSV tables. Writers are deterministic so
// repeated runs produce byte-identical files.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lhl/core.hpp"

namespace lhl {
namespace report {

std::string trace_to_jsonl(const Traceroute& trace);

inline constexpr const char* kLinkCsvHeader =
    "near_router,far_router,min_diff_ms,samples,near_cc,far_cc,near_cont,far_cont,"
    "near_asn,far_asn,mpls,relationship,near_lat,near_lon,far_lat,far_lon";

std::string link_to_csv_row(const LongHaulLink& link);
// Throws std::runtime_error on malformed rows. ip_pairs is not part of the
// report form and comes back empty.
LongHaulLink link_from_csv_row(const std::string& row);

void write_links_csv(std::ostream& out, const std::vector<LongHaulLink>& links);
std::vector<LongHaulLink> read_links_csv(std::istream& in);
std::vector<LongHaulLink> read_links_csv_file(const std::string& path);

// Candidate cache: a JSON header line carrying a digest of (input, detector
// config, sampling), then one candidate per line.
void write_candidates_file(const std::string& path, const std::vector<CandidateLink>& candidates,
                           const std::string& digest);
// nullopt when the file is missing, malformed, or carries another digest.
std::optional<std::vector<CandidateLink>> read_candidates_file(const std::string& path,
                                                               const std::string& digest);

void write_csv_file(const std::string& path, const std::string& header,
                    const std::vector<std::vector<std::string>>& rows);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace report
}  // namespace lhl
