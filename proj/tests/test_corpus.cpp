#include "support/checks.hpp"

#include "avscan/corpus.hpp"

#include <doctest.h>

#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

using namespace avscan;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

void write(fs::path const& p, std::string const& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
}

// Independent trigram set for whitespace-separated text without keywords.
std::set<std::string> oracle_trigrams(std::string const& text) {
    std::istringstream in(text);
    std::vector<std::string> toks;
    std::string w;
    while (in >> w) {
        if (std::regex_match(w, std::regex("[A-Za-z_][A-Za-z0-9_]*"))) toks.push_back("ID");
        else if (std::regex_match(w, std::regex("[0-9]+"))) toks.push_back("NUM");
        else toks.push_back(w);
    }
    std::set<std::string> out;
    for (std::size_t i = 0; i + 2 < toks.size(); ++i) out.insert(toks[i] + " " + toks[i + 1] + " " + toks[i + 2]);
    return out;
}

double oracle_jaccard(std::string const& a, std::string const& b) {
    auto x = oracle_trigrams(a), y = oracle_trigrams(b);
    std::size_t inter = 0;
    for (auto const& g : x) inter += y.count(g);
    return static_cast<double>(inter) / static_cast<double>(x.size() + y.size() - inter);
}

}  // namespace

TEST_CASE("bucket boundaries") {
    CHECK(bucket_index(0.0) == 0);
    CHECK(bucket_index(0.0999) == 0);
    CHECK(bucket_index(0.1) == 1);
    CHECK(bucket_index(0.95) == 9);
    CHECK(bucket_index(0.9999) == 9);
    CHECK(bucket_index(1.0) == 10);
}

TEST_CASE("similarity histogram separates copies, planted pairs and unrelated code") {
    auto root = temp_dir("similarity");
    std::string base = read_file(scan_fixture("cb01_auction"));
    write(root / "alpha/a.sol", base);
    write(root / "beta/b.sol", base);  // exact copy
    std::string p1 = "p = q + 1 ; r = s * 2 ; t = u - 3 ; v = w / 4 ;";
    std::string p2 = "p = q + 1 ; r = s * 2 ; t = u - 3 ; v = w % 4 ; x = y ^ 5 ;";
    write(root / "gamma.sol", p1);
    write(root / "delta.sol", p2);
    write(root / "omega.sol", "{ [ ( ) ] } : ? ! ~");

    auto idx = index_corpus(root);
    REQUIRE(idx.accounts.size() == 5);
    auto h = similarity_histogram(idx);
    REQUIRE(h.buckets.size() == 11);
    CHECK(h.total == 5);
    std::map<std::string, double> best(h.per_account.begin(), h.per_account.end());
    CHECK(best["alpha"] == 1.0);
    CHECK(best["beta"] == 1.0);
    CHECK(h.buckets[10].count == 2);
    double planted = oracle_jaccard(p1, p2);
    CHECK(best["gamma.sol"] == doctest::Approx(planted));
    CHECK(best["delta.sol"] == doctest::Approx(planted));
    CHECK(h.buckets[static_cast<std::size_t>(bucket_index(planted))].count >= 2);
    CHECK(best["omega.sol"] < 0.1);
    CHECK(h.buckets[0].count >= 1);
}

TEST_CASE("accounts are fingerprinted and sorted") {
    auto root = temp_dir("index");
    write(root / "zeta/b.sol", "contract B {}");
    write(root / "zeta/a.sol", "contract A {}");
    write(root / "acct.sol", "contract C {}");
    write(root / "notes.txt", "ignored");
    auto idx = index_corpus(root);
    REQUIRE(idx.accounts.size() == 2);
    CHECK(idx.accounts[0].account == "acct.sol");
    CHECK(idx.accounts[1].account == "zeta");
    REQUIRE(idx.accounts[1].files.size() == 2);
    CHECK(idx.accounts[1].files[0].filename() == "a.sol");
    CHECK(idx.accounts[1].fingerprint.size() == 16);
    CHECK_THROWS(index_corpus(root / "missing"));
}

TEST_CASE("labeled segments follow the vulnerable marker") {
    std::string src = "contract A {\n function f() public { }\n // @vulnerable\n function g() public { }\n"
                      " function h() public { }\n}\n";
    auto segs = labeled_segments(src, "m.sol");
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].origin.function == "g");
    auto all = labeled_segments("contract A {\n constructor() public { }\n function f() public { }\n"
                                " function g() public { }\n}\n",
                                "n.sol");
    CHECK(all.size() == 2);
}

TEST_CASE("learn reports unreadable input as a diagnostic") {
    auto root = temp_dir("learn-bad");
    write(root / "bad.sol", "contract {");
    auto res = learn({root / "bad.sol"}, VulnType::Reentrancy, 50);
    CHECK(res.avs.empty());
    REQUIRE(res.diagnostics.size() == 1);
    CHECK(res.diagnostics[0].find("bad.sol") != std::string::npos);
}
