#include "support/checks.hpp"

#include "avscan/corpus.hpp"
#include "avscan/lexer.hpp"
#include "avscan/parser.hpp"

#include <doctest.h>

#include <algorithm>

using namespace avscan;
using namespace testsupport;

namespace {

ast::SourceUnit parse_fixture(std::string const& stem) {
    auto p = scan_fixture(stem);
    return parse_source(read_file(p), p.string());
}

}  // namespace

TEST_CASE("auction bid is payable with four statements") {
    auto unit = parse_fixture("cb01_auction");
    auto const* c = unit.find_contract("Auction");
    REQUIRE(c);
    auto const* f = c->find_function("bid");
    REQUIRE(f);
    CHECK(f->mutability == ast::Mutability::Payable);
    REQUIRE(f->body);
    CHECK(f->body->children.size() == 4);
}

TEST_CASE("empty source has no contracts") {
    CHECK(parse_source("", "empty.sol").contracts.empty());
    CHECK(parse_source("pragma solidity ^0.4.24;\n// nothing\n", "p.sol").contracts.empty());
}

TEST_CASE("applied modifiers are recorded") {
    auto unit = parse_fixture("cb03_reg_documents");
    auto const* f = unit.find_contract("RegDocuments")->find_function("regstDocs");
    REQUIRE(f);
    REQUIRE(f->applied_modifiers.size() == 1);
    CHECK(f->applied_modifiers[0].name == "onlyAdmin");
    CHECK(f->unresolved_modifiers.empty());
}

TEST_CASE("enumeration includes interface declarations") {
    auto unit = parse_fixture("cb05_zethr_bankroll");
    std::vector<std::string> names;
    for (auto const& ref : enumerate_functions(unit)) names.push_back(ref.function->name);
    CHECK(std::find(names.begin(), names.end(), "buyAndSetDivPercentage") != names.end());
    CHECK(std::find(names.begin(), names.end(), "receiveDividends") != names.end());
}

TEST_CASE("spans nest: contract > function > statement") {
    for (auto const& path : scan_fixtures()) {
        CAPTURE(path.string());
        auto unit = parse_source(read_file(path), path.string());
        for (auto const& c : unit.contracts) {
            CHECK(c.span.valid());
            for (auto const& f : c.functions) {
                CHECK(c.span.contains(f.span));
                if (!f.body) continue;
                CHECK(f.span.contains(f.body->span));
                ast::walk(*f.body, [&](ast::Node const& n) {
                    if (n.span.valid()) CHECK(f.body->span.contains(n.span));
                });
            }
        }
    }
}

TEST_CASE("tokens and trivia reproduce the source") {
    std::vector<std::filesystem::path> files = scan_fixtures();
    for (auto const& f : collect_sources({source_dir() / "data/train"})) files.push_back(f);
    for (auto const& path : files) {
        CAPTURE(path.string());
        auto text = read_file(path);
        std::string rebuilt;
        for (auto const& t : tokenize(text)) {
            rebuilt += t.trivia;
            rebuilt += t.text;
        }
        CHECK(rebuilt == text);
    }
}

TEST_CASE("syntax errors carry a position") {
    try {
        parse_source("contract A {\n  function f() public {\n    x = ;\n  }\n}\n", "bad.sol");
        FAIL("expected a syntax error");
    } catch (SyntaxError const& e) {
        CHECK(e.line() == 3);
        CHECK(e.col() > 0);
        CHECK(e.diagnostic().format().find("bad.sol:3:") == 0);
    }
}

TEST_CASE("inline assembly becomes an opaque statement with a diagnostic") {
    auto unit = parse_source(
        "contract A {\n  function f() public {\n    assembly { let x := 1 }\n  }\n}\n", "asm.sol");
    REQUIRE(unit.contracts.size() == 1);
    auto const& body = *unit.contracts[0].functions[0].body;
    REQUIRE(body.children.size() == 1);
    CHECK(body.children[0].kind == ast::NodeKind::Opaque);
    CHECK_FALSE(unit.diagnostics.empty());
}
