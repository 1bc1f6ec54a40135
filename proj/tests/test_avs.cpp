#include "support/checks.hpp"

#include "avscan/avs.hpp"
#include "avscan/corpus.hpp"
#include "avscan/normalize.hpp"
#include "avscan/parser.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

using namespace avscan;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> keys_of(NormalizedSegment const& s) {
    std::vector<std::string> out;
    for (auto const* st : s.statements()) out.push_back(statement_key(*st));
    return out;
}

NormalizedSegment random_segment(std::mt19937& rng) {
    static const char* pool[] = {"x = x + 1;", "require(x != 2);", "s = x;", "a.transfer(x);",
                                 "if (x > 2) { s = 1; }", "while (x < n) { x = x + 1; }"};
    std::string body;
    int n = std::uniform_int_distribution<int>(1, 7)(rng);
    for (int i = 0; i < n; ++i) body += std::string(pool[rng() % 6]) + "\n";
    auto unit = parse_source("contract T { uint s; address a; function f(uint x, uint n) public {\n" + body + "} }",
                             "r.sol");
    return normalize_function(unit.contracts[0].functions[0], unit.contracts[0]);
}

}  // namespace

TEST_CASE("three-way progressive alignment is sound and bounded by pairwise LCS") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<NormalizedSegment> segs{random_segment(rng), random_segment(rng), random_segment(rng)};
        std::vector<std::string> ids{"a", "b", "c"};
        auto dm = pairwise_distances(segs, ids);
        auto al = progressive_align(segs, ids, dm);
        CHECK(al.passes == 2);
        std::vector<std::vector<std::string>> keys{keys_of(segs[0]), keys_of(segs[1]), keys_of(segs[2])};
        std::vector<std::vector<std::size_t>> seen(3);
        for (auto const& slot : al.slots) {
            for (std::size_t i = 0; i < 3; ++i) {
                if (!slot.positions[i]) continue;
                auto p = *slot.positions[i];
                seen[i].push_back(p);
                CHECK(keys[i].at(p) == slot.key);
            }
            if (slot.status == AlignmentSlot::Status::Common)
                for (std::size_t i = 0; i < 3; ++i) CHECK(slot.positions[i].has_value());
        }
        // every statement appears exactly once, in order
        for (std::size_t i = 0; i < 3; ++i) {
            std::vector<std::size_t> want(keys[i].size());
            for (std::size_t k = 0; k < want.size(); ++k) want[k] = k;
            CHECK(seen[i] == want);
        }
        auto common = al.common().size();
        CHECK(common <= dp_lcs(keys[0], keys[1]));
        CHECK(common <= dp_lcs(keys[0], keys[2]));
        CHECK(common <= dp_lcs(keys[1], keys[2]));
    }
}

TEST_CASE("identical instances align completely") {
    std::mt19937 rng(2);
    auto s = random_segment(rng);
    std::vector<NormalizedSegment> segs{s, s, s};
    std::vector<std::string> ids{"p", "q", "r"};
    auto al = progressive_align(segs, ids, pairwise_distances(segs, ids));
    CHECK(al.common().size() == s.statements().size());
}

TEST_CASE("extraction reports empty cores and degenerate clusters") {
    auto a = parse_source("contract A { uint s; function f() public { s = 1; } function g(uint x) public { "
                          "require(x > 1); } }",
                          "a.sol");
    auto f = normalize_function(a.contracts[0].functions[0], a.contracts[0]);
    auto g = normalize_function(a.contracts[0].functions[1], a.contracts[0]);
    std::vector<std::string> ids{"f", "g"};
    std::vector<NormalizedSegment> segs{f, g};
    CHECK_THROWS_AS(extract_avs(segs, ids, pairwise_distances(segs, ids), VulnType::Reentrancy), EmptyCore);
    CHECK_THROWS_AS(extract_avs({}, {}, DistanceMatrix{}, VulnType::Reentrancy), DegenerateCluster);
}

TEST_CASE("curation keeps the chosen statements and records its origin") {
    auto res = learn({scan_fixture("cb01_auction")}, VulnType::UnexpectedRevert, 50);
    REQUIRE(res.avs.size() == 1);
    auto const& full = res.avs[0];
    CHECK(full.body.statements().size() == 4);
    auto cur = curate_avs(full, {1, 2, 3});
    CHECK(cur.curated);
    CHECK(cur.curated_from == full.id);
    CHECK(cur.body.statements().size() == 3);
    CHECK(cur.id != full.id);
    CHECK(cur.id.rfind("unexpected-revert-", 0) == 0);
    CHECK_THROWS(curate_avs(full, {7}));
    CHECK_THROWS(curate_avs(full, {}));
}

TEST_CASE("signatures round-trip through the store") {
    auto dir = temp_dir("store-roundtrip");
    auto res = learn(collect_sources({source_dir() / "fixtures/learn"}), VulnType::Reentrancy, 50);
    REQUIRE(res.avs.size() == 1);
    auto path = write_avs(dir, res.avs[0]);
    CHECK(path.filename().string() == res.avs[0].id + ".avs.json");
    auto back = load_store(dir);
    REQUIRE(back.size() == 1);
    CHECK(to_json(back[0]).dump() == to_json(res.avs[0]).dump());
}

TEST_CASE("bundled store has 42 signatures with the intended type mix") {
    auto store = load_store(bundled_store());
    CHECK(store.size() == 42);
    std::map<VulnType, int> count;
    for (auto const& a : store) {
        ++count[a.vuln_type];
        CHECK(a.id.rfind(std::string(short_name(a.vuln_type)) + "-", 0) == 0);
        CHECK(a.ir_signature.size() > 0);
    }
    CHECK(count[VulnType::Reentrancy] == 20);
    CHECK(count[VulnType::TxOriginAbuse] == 5);
    CHECK(count[VulnType::UncheckedLowLevelCall] == 4);
    CHECK(count[VulnType::UnexpectedRevert] == 8);
    CHECK(count[VulnType::SelfdestructAbuse] == 5);
}

TEST_CASE("rebuilding the bundled store is byte-identical") {
    auto dir = temp_dir("store-rebuild");
    auto run = run_program(store_builder_path(), {(source_dir() / "data/train/manifest.txt").string(), "--out",
                                                  dir.string()});
    REQUIRE(run.exit_code == 0);
    std::vector<fs::path> built, bundled;
    for (auto const& e : fs::directory_iterator(dir)) built.push_back(e.path().filename());
    for (auto const& e : fs::directory_iterator(bundled_store())) bundled.push_back(e.path().filename());
    std::sort(built.begin(), built.end());
    std::sort(bundled.begin(), bundled.end());
    CHECK(built == bundled);
    for (auto const& name : bundled) {
        CAPTURE(name.string());
        if (fs::exists(dir / name)) CHECK(read_file(dir / name) == read_file(bundled_store() / name));
    }
}
