#include "support/checks.hpp"

#include "avscan/matcher.hpp"

#include <doctest.h>

using namespace avscan;
using namespace testsupport;

using Seq = std::vector<std::string>;

TEST_CASE("lcs similarity is normalized by the signature length") {
    auto r = lcs_similarity(Seq{"a", "b", "c", "d"}, Seq{"x", "a", "c", "y", "d"});
    CHECK(r.length == 3);
    CHECK(r.similarity == doctest::Approx(0.75));
    CHECK(r.target_indices == std::vector<std::size_t>{1, 2, 4});
    CHECK(lcs_similarity(Seq{}, Seq{"a"}).similarity == 0.0);
}

TEST_CASE("lcs matches a quadratic DP on random pairs") {
    auto r = check_lcs_oracle(1000);
    INFO(r.detail);
    CHECK(r.pass);
}

TEST_CASE("inclusion finds the leftmost embedding") {
    auto pos = inclusion_positions(Seq{"a", "b"}, Seq{"b", "a", "x", "b", "b"});
    REQUIRE(pos);
    CHECK(*pos == std::vector<std::size_t>{1, 3});
    CHECK_FALSE(inclusion_positions(Seq{"b", "a"}, Seq{"a", "b"}));
    CHECK(inclusion_positions(Seq{}, Seq{"a"}));
}

TEST_CASE("window width is ceil(|S1| / eta)") {
    CHECK(window_width(7, 0.7) == 10);
    CHECK(window_width(10, 0.7) == 15);
    CHECK(window_width(3, 1.0) == 3);
    CHECK(window_width(4, 0.5) == 8);
}

TEST_CASE("eta must lie in (0, 1]") {
    CHECK_THROWS(MatchConfig{0.0, 0}.validate());
    CHECK_THROWS(MatchConfig{1.5, 0}.validate());
    CHECK_NOTHROW(MatchConfig{1.0, 0}.validate());
}

TEST_CASE("matching falls back from lcs to inclusion") {
    MatchConfig mc;
    Seq sig{"a", "b", "c"};
    auto direct = match_sequences(sig, Seq{"a", "b", "c"}, mc);
    CHECK(direct.matched);
    CHECK(direct.method == MatchMethod::Lcs);
    CHECK(direct.similarity == doctest::Approx(1.0));

    Seq spread{"a", "x", "x", "x", "x", "b", "x", "x", "x", "x", "x", "x", "c", "x", "x", "x", "x", "x", "x", "x"};
    auto incl = match_sequences(sig, spread, mc);
    CHECK(incl.matched);
    CHECK(incl.method == MatchMethod::Inclusion);
    CHECK(incl.matched_span == std::vector<std::size_t>{0, 5, 12});

    auto miss = match_sequences(sig, Seq{"c", "b", "x"}, mc);
    CHECK_FALSE(miss.matched);
}

TEST_CASE("curated auction signature reaches CB2 by inclusion and CB9 matches CB10 directly") {
    auto r = check_matching_paths();
    INFO(r.detail);
    CHECK(r.pass);
}
