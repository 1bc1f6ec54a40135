#pragma once

#include "avscan/ast.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace avscan {

inline constexpr char kWildcard[] = "*";
inline constexpr char kCallWildcard[] = "*CALL*";
inline constexpr char kAddrWildcard[] = "*ADDR*";

struct SegmentOrigin {
    std::string path;
    std::string contract;
    std::string function;
    ast::Span span;
};

/// Per-function tree with names and constants abstracted. The root is a Block
/// whose leading children are the non-empty ParamList / ReturnList /
/// ModifierList headers, followed by the body statements.
struct NormalizedSegment {
    SegmentOrigin origin;
    ast::Node root{ast::NodeKind::Block};
    std::size_t node_count = 1;

    /// Top-level body statements (headers excluded).
    std::vector<ast::Node const*> statements() const;
};

/// Label of a single node after abstraction. Applying it to an already
/// abstracted node returns the same label.
std::string abstract_label(ast::Node const& node);

/// Returns a copy of `node` with every label abstracted. Spans are kept.
ast::Node abstract_labels(ast::Node const& node);

NormalizedSegment normalize_function(ast::FunctionDef const& f, ast::ContractDef const& owner);

/// Builds a segment directly from statements (used for AVS bodies).
NormalizedSegment make_segment(std::vector<ast::Node> statements, SegmentOrigin origin);

std::string fingerprint(ast::Node const& root);
inline std::string segment_fingerprint(NormalizedSegment const& s) { return fingerprint(s.root); }

/// Token string for one normalized statement; alignment compares these.
std::string statement_key(ast::Node const& stmt);

nlohmann::json node_to_json(ast::Node const& node);
ast::Node node_from_json(nlohmann::json const& j);
nlohmann::json segment_to_json(NormalizedSegment const& s);
NormalizedSegment segment_from_json(nlohmann::json const& j);

/// Built-in member names that survive normalization.
bool is_builtin_member(std::string_view name);
/// Built-in free functions that survive normalization.
bool is_builtin_function(std::string_view name);
/// Member names that denote a money transfer even on user-defined receivers.
bool is_transfer_like_name(std::string_view name);

}  // namespace avscan
