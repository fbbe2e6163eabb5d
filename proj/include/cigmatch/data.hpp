#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cigmatch::data {

struct LabeledPair {
    int label = 0;  // 0 or 1
    std::string doc_a;
    std::string doc_b;
};

struct DatasetSplit {
    std::vector<LabeledPair> train;
    std::vector<LabeledPair> dev;
    std::vector<LabeledPair> test;
};

// One JSON object per line with fields label, doc_a, doc_b. Malformed lines
// raise std::runtime_error naming the line number.
std::vector<LabeledPair> load_jsonl(const std::string& path);
void save_jsonl(const std::string& path, const std::vector<LabeledPair>& pairs);

// CSV/TSV with columns label, doc_a, doc_b (header optional; detected when the
// first field of the first row is not 0/1). Quoted fields per RFC 4180.
std::vector<LabeledPair> import_delimited(const std::string& path, char delimiter);

// Deterministic seeded shuffle, then 60/20/20. Train and dev sizes are
// rounded to nearest; test takes the remainder. Requires >= 5 pairs.
DatasetSplit split(const std::vector<LabeledPair>& pairs, std::uint64_t seed);

struct SyntheticParams {
    int n_pairs = 500;
    int n_topics = 5;
    int vocab_size = 2000;
    std::uint64_t seed = 7;
    int keywords_per_topic = 10;
    // Fraction of sentences that are pure boilerplate built from the shared
    // background subpool; higher values make negatives lexically harder.
    double background_overlap = 0.35;
    // Probability that a topic slot in a negative document carries a keyword
    // of the partner's topic instead. High values make the two documents of a
    // negative pair share many tokens globally even though no sentence-level
    // concept aligns.
    double contamination = 0.25;
};

// Topic-pool corpus generator: positives pair documents from one topic,
// negatives pair different topics that still share background tokens.
// Labels are balanced within one pair.
std::vector<LabeledPair> gen_synthetic(const SyntheticParams& params);

}  // namespace cigmatch::data
