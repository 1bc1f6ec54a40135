#pragma once

#include "avscan/avs.hpp"
#include "avscan/normalize.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace avscan {

std::string read_file(std::filesystem::path const& p);

/// Expands files and directories into a sorted list of `.sol` files.
/// Throws std::runtime_error for a path that does not exist.
std::vector<std::filesystem::path> collect_sources(std::vector<std::filesystem::path> const& inputs);

/// Segments of the labeled functions in one file. A function is labeled when a
/// `@vulnerable` comment appears between it and the previous function; files
/// without any marker contribute every non-constructor function with a body.
std::vector<NormalizedSegment> labeled_segments(std::string const& text, std::string const& path);

struct LearnResult {
    std::vector<NormalizedSegment> segments;
    std::vector<std::string> ids;
    DistanceMatrix distances;
    std::vector<std::vector<std::string>> clusters;
    std::vector<AvsSignature> avs;
    std::vector<std::string> diagnostics;
};

/// parse -> normalize -> distances -> cluster(cutoff) -> extract per cluster.
/// Segment ids are `<file stem>:<function>`.
LearnResult learn(std::vector<std::filesystem::path> const& files, VulnType vt, int height_cutoff, unsigned jobs = 1);

struct AccountFile {
    std::string account;
    std::vector<std::filesystem::path> files;
    std::string fingerprint;
    std::size_t size = 0;
};

struct CorpusIndex {
    std::filesystem::path root;
    std::vector<AccountFile> accounts;
    std::vector<std::string> warnings;
};

/// One account per top-level directory; loose files are single-file accounts.
CorpusIndex index_corpus(std::filesystem::path const& root);

/// Token trigrams with identifiers, numbers and strings abstracted.
std::vector<std::string> token_trigrams(std::string_view source);
double trigram_jaccard(std::vector<std::string> const& a, std::vector<std::string> const& b);

struct SimilarityBucket {
    int lower = 0;  // percent, inclusive
    int upper = 0;  // percent, exclusive except for the 100% bucket
    std::size_t count = 0;
};

struct SimilarityHistogram {
    std::vector<SimilarityBucket> buckets;
    std::size_t total = 0;
    std::vector<std::pair<std::string, double>> per_account;  // maximum similarity
};

SimilarityHistogram similarity_histogram(CorpusIndex const& index, std::vector<std::string>* warnings = nullptr);
/// 10% buckets plus a separate bucket for exact 100%.
int bucket_index(double similarity);

nlohmann::json to_json(SimilarityHistogram const& h);

}  // namespace avscan
