#include "avscan/matcher.hpp"

#include <cmath>
#include <stdexcept>

namespace avscan {

void MatchConfig::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in (0, 1]");
}

std::string_view to_string(MatchMethod m) {
    switch (m) {
        case MatchMethod::Lcs: return "lcs";
        case MatchMethod::WindowedLcs: return "windowed_lcs";
        case MatchMethod::Inclusion: return "inclusion";
        case MatchMethod::None: break;
    }
    return "none";
}

std::vector<std::string> sequence_keys(IrSequence const& s) {
    std::vector<std::string> keys;
    keys.reserve(s.items.size());
    for (auto const& it : s.items) keys.push_back(instruction_key(it.ins));
    return keys;
}

namespace {

LcsResult lcs_range(std::vector<std::string> const& a, std::vector<std::string> const& b, std::size_t begin,
                    std::size_t end) {
    std::size_t n = a.size(), m = end - begin;
    std::vector<std::vector<unsigned>> dp(n + 1, std::vector<unsigned>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            dp[i][j] = a[i] == b[begin + j] ? dp[i + 1][j + 1] + 1 : std::max(dp[i + 1][j], dp[i][j + 1]);
    LcsResult r;
    r.length = dp[0][0];
    r.similarity = n ? static_cast<double>(r.length) / static_cast<double>(n) : 0.0;
    // forward traceback takes the earliest target position at each step
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (a[i] == b[begin + j] && dp[i][j] == dp[i + 1][j + 1] + 1) {
            r.target_indices.push_back(begin + j);
            ++i;
            ++j;
        } else if (dp[i + 1][j] >= dp[i][j + 1]) {
            ++i;
        } else {
            ++j;
        }
    }
    return r;
}

}  // namespace

LcsResult lcs_similarity(std::vector<std::string> const& s1, std::vector<std::string> const& s2) {
    return lcs_range(s1, s2, 0, s2.size());
}

LcsResult lcs_similarity(IrSequence const& s1, IrSequence const& s2) {
    return lcs_similarity(sequence_keys(s1), sequence_keys(s2));
}

std::optional<std::vector<std::size_t>> inclusion_positions(std::vector<std::string> const& s1,
                                                            std::vector<std::string> const& s2) {
    std::vector<std::size_t> pos;
    std::size_t j = 0;
    for (auto const& item : s1) {
        while (j < s2.size() && s2[j] != item) ++j;
        if (j == s2.size()) return std::nullopt;
        pos.push_back(j++);
    }
    return pos;
}

bool is_included_by_order(IrSequence const& s1, IrSequence const& s2) {
    return inclusion_positions(sequence_keys(s1), sequence_keys(s2)).has_value();
}

std::size_t window_width(std::size_t signature_len, double eta) {
    // small epsilon keeps e.g. 7 / 0.7 at 10 despite floating point error
    return static_cast<std::size_t>(std::ceil(static_cast<double>(signature_len) / eta - 1e-9));
}

MatchResult match_sequences(std::vector<std::string> const& signature, std::vector<std::string> const& target,
                            MatchConfig const& cfg) {
    cfg.validate();
    MatchResult res;
    if (signature.empty()) return res;
    std::size_t width = window_width(signature.size(), cfg.eta);
    LcsResult best;
    bool windowed = target.size() > width;
    if (!windowed) {
        best = lcs_similarity(signature, target);
    } else {
        std::size_t step = cfg.itv ? cfg.itv : std::max<std::size_t>(1, signature.size() / 2);
        for (std::size_t pos = 0; pos < target.size(); pos += step) {
            std::size_t end = std::min(target.size(), pos + width);
            LcsResult r = lcs_range(signature, target, pos, end);
            if (r.length > best.length) best = std::move(r);
            if (end == target.size()) break;
        }
    }
    res.similarity = best.similarity;
    if (best.similarity >= cfg.eta - 1e-12) {
        res.matched = true;
        res.method = windowed ? MatchMethod::WindowedLcs : MatchMethod::Lcs;
        res.matched_span = std::move(best.target_indices);
        return res;
    }
    if (auto pos = inclusion_positions(signature, target)) {
        res.matched = true;
        res.method = MatchMethod::Inclusion;
        res.matched_span = std::move(*pos);
    }
    return res;
}

}  // namespace avscan
