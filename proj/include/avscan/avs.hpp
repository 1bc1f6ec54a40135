#pragma once

#include "avscan/cfg.hpp"
#include "avscan/cluster.hpp"
#include "avscan/normalize.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace avscan {

enum class VulnType { Reentrancy, TxOriginAbuse, UncheckedLowLevelCall, UnexpectedRevert, SelfdestructAbuse };

inline constexpr VulnType kAllVulnTypes[] = {VulnType::Reentrancy, VulnType::TxOriginAbuse,
                                             VulnType::UncheckedLowLevelCall, VulnType::UnexpectedRevert,
                                             VulnType::SelfdestructAbuse};

std::string_view to_string(VulnType t);
/// Short lowercase name used in AVS ids and directory names.
std::string_view short_name(VulnType t);
/// Accepts both the enum spelling and the short name.
std::optional<VulnType> vuln_type_from_string(std::string_view s);

class DegenerateCluster : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class EmptyCore : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AlignmentSlot {
    enum class Status { Common, Gap };
    Status status = Status::Common;
    std::string key;
    /// Statement index per cluster instance; empty where the instance has no counterpart.
    std::vector<std::optional<std::size_t>> positions;
};

struct Alignment {
    std::vector<AlignmentSlot> slots;
    std::vector<std::size_t> fold_order;  // instance indices in the order they were aligned
    std::size_t passes = 0;

    std::vector<AlignmentSlot const*> common() const;
};

/// Statement-level progressive alignment. `ids[i]` names `cluster[i]` in `dm`.
Alignment progressive_align(std::vector<NormalizedSegment> const& cluster, std::vector<std::string> const& ids,
                            DistanceMatrix const& dm);

struct AvsSignature {
    std::string id;
    VulnType vuln_type = VulnType::Reentrancy;
    NormalizedSegment body;
    IrSequence ir_signature;
    std::vector<SegmentOrigin> provenance;
    bool curated = false;
    std::string curated_from;
    std::vector<std::size_t> kept;
    std::size_t min_core_statements = 1;
};

/// CFG-lowered, normalized and flattened IR of a segment's statements.
IrSequence signature_sequence(NormalizedSegment const& body);

AvsSignature extract_avs(std::vector<NormalizedSegment> const& cluster, std::vector<std::string> const& ids,
                         DistanceMatrix const& dm, VulnType vt);

AvsSignature curate_avs(AvsSignature const& avs, std::vector<std::size_t> const& keep);

nlohmann::json to_json(AvsSignature const& avs);
AvsSignature avs_from_json(nlohmann::json const& j);

/// Writes `<dir>/<id>.avs.json` and returns the path.
std::filesystem::path write_avs(std::filesystem::path const& dir, AvsSignature const& avs);
/// Loads every `*.avs.json` in `dir`, sorted by file name.
std::vector<AvsSignature> load_store(std::filesystem::path const& dir);

}  // namespace avscan
