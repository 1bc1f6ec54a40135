#include "support/checks.hpp"

#include "avscan/corpus.hpp"
#include "avscan/normalize.hpp"
#include "avscan/parser.hpp"

#include <doctest.h>

#include <random>

using namespace avscan;
using namespace testsupport;

TEST_CASE("abstraction is idempotent") {
    auto unit = parse_source(read_file(scan_fixture("cb02_auction_potato")), "cb02");
    for (auto const& ref : enumerate_functions(unit)) {
        if (!ref.function->body) continue;
        auto seg = normalize_function(*ref.function, *ref.contract);
        ast::walk(seg.root, [](ast::Node const& n) { CHECK(abstract_label(n) == n.text); });
        auto again = abstract_labels(seg.root);
        CHECK(again.same_shape(seg.root));
    }
}

TEST_CASE("segment root holds headers then body statements") {
    auto unit = parse_source(read_file(scan_fixture("cb03_reg_documents")), "cb03");
    auto const* c = unit.find_contract("RegDocuments");
    auto seg = normalize_function(*c->find_function("regstDocs"), *c);
    REQUIRE(seg.root.kind == ast::NodeKind::Block);
    CHECK(seg.root.children.front().kind == ast::NodeKind::ParamList);
    CHECK(seg.statements().size() == c->find_function("regstDocs")->body->children.size());
    CHECK(seg.node_count == seg.root.size());
}

TEST_CASE("identifiers and literals abstract, builtins survive") {
    auto a = parse_source("contract A { uint total; function f(uint amount) public { total = amount + 5; "
                          "msg.sender.transfer(this.balance); } }", "a");
    auto b = parse_source("contract A { uint money; function f(uint value2) public { money = value2 + 9; "
                          "msg.sender.transfer(this.balance); } }", "b");
    auto sa = normalize_function(a.contracts[0].functions[0], a.contracts[0]);
    auto sb = normalize_function(b.contracts[0].functions[0], b.contracts[0]);
    CHECK(segment_fingerprint(sa) == segment_fingerprint(sb));
    CHECK(segment_fingerprint(sa).size() == 16);
    auto dump = segment_to_json(sa).dump();
    CHECK(dump.find("balance") != std::string::npos);
    CHECK(dump.find("total") == std::string::npos);
}

TEST_CASE("segments round-trip through JSON") {
    auto unit = parse_source(read_file(scan_fixture("cb12_alice")), "cb12");
    for (auto const& ref : enumerate_functions(unit)) {
        if (!ref.function->body) continue;
        auto seg = normalize_function(*ref.function, *ref.contract);
        auto back = segment_from_json(segment_to_json(seg));
        CHECK(back.root.same_shape(seg.root));
        CHECK(segment_fingerprint(back) == segment_fingerprint(seg));
        CHECK(segment_to_json(back).dump() == segment_to_json(seg).dump());
    }
}

TEST_CASE("perturbation keeps the layout and changes names") {
    std::mt19937 rng(5);
    auto text = read_file(scan_fixture("cb04_bancor_lender"));
    auto mutated = perturb_source(text, rng);
    CHECK(mutated.size() == text.size());
    CHECK(mutated != text);
    CHECK(segments_dump(text, "x") == segments_dump(mutated, "x"));
}

TEST_CASE("renames and literal substitutions leave segments and findings unchanged") {
    auto r = check_normalization_properties(120);
    INFO(r.detail);
    CHECK(r.pass);
}
