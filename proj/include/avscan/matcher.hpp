#pragma once

#include "avscan/cfg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace avscan {

struct MatchConfig {
    double eta = 0.7;
    /// Window step; 0 selects max(1, |signature| / 2).
    std::size_t itv = 0;

    void validate() const;
};

enum class MatchMethod { None, Lcs, WindowedLcs, Inclusion };
std::string_view to_string(MatchMethod m);

struct MatchResult {
    bool matched = false;
    MatchMethod method = MatchMethod::None;
    double similarity = 0.0;
    std::vector<std::size_t> matched_span;  // indices into the target
    std::string avs_id;
};

struct LcsResult {
    double similarity = 0.0;
    std::size_t length = 0;
    std::vector<std::size_t> target_indices;
};

/// Key sequence used by every comparison below; items compare equal iff
/// their keys are equal.
std::vector<std::string> sequence_keys(IrSequence const& s);

LcsResult lcs_similarity(std::vector<std::string> const& s1, std::vector<std::string> const& s2);
LcsResult lcs_similarity(IrSequence const& s1, IrSequence const& s2);

/// Leftmost embedding of s1 in s2 as a subsequence, empty optional if none.
std::optional<std::vector<std::size_t>> inclusion_positions(std::vector<std::string> const& s1,
                                                            std::vector<std::string> const& s2);
bool is_included_by_order(IrSequence const& s1, IrSequence const& s2);

std::size_t window_width(std::size_t signature_len, double eta);

MatchResult match_sequences(std::vector<std::string> const& signature, std::vector<std::string> const& target,
                            MatchConfig const& cfg);

}  // namespace avscan
