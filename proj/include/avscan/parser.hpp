#pragma once

#include "avscan/ast.hpp"
#include "avscan/lexer.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace avscan {

/// Parses a Solidity 0.4.x-style subset. Throws SyntaxError on malformed input;
/// constructs the grammar deliberately skips (inline assembly, try/catch, tuple
/// declarations) become Opaque statements and are listed in the unit's
/// diagnostics.
ast::SourceUnit parse_source(std::string_view text, std::string path);

struct FunctionRef {
    ast::ContractDef const* contract = nullptr;
    ast::FunctionDef const* function = nullptr;
};

/// All functions in declaration order, including fallbacks, constructors and
/// body-less interface declarations.
std::vector<FunctionRef> enumerate_functions(ast::SourceUnit const& unit);

bool is_elementary_type_name(std::string_view name);

}  // namespace avscan
