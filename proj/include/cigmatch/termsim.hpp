#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace cigmatch::termsim {

// Sparse token -> weight map; zero-weight entries are never stored.
using TermVector = std::unordered_map<std::string, double>;

// Term counts for one side of a comparison.
using TermCounts = std::unordered_map<std::string, int>;

TermCounts count_terms(const std::vector<std::string>& tokens);

// Smoothed inverse document frequencies over a corpus, always > 0.
// Unseen tokens get ln(N+1) + 1.
class IdfTable {
public:
    IdfTable() = default;
    explicit IdfTable(const std::vector<TermCounts>& corpus);

    double idf(const std::string& token) const;
    double avg_doc_len() const { return avg_doc_len_; }
    std::size_t corpus_size() const { return corpus_size_; }

    const std::unordered_map<std::string, double>& entries() const { return idf_; }
    void set(std::unordered_map<std::string, double> idf, double avg_len, std::size_t n);

private:
    std::unordered_map<std::string, double> idf_;
    double default_idf_ = 1.0;
    double avg_doc_len_ = 1.0;
    std::size_t corpus_size_ = 0;
};

// The five term-based similarity metrics, each in [0,1].
struct SimilarityFeatures {
    double tfidf_cos = 0.0;
    double tf_cos = 0.0;
    double bm25_cos = 0.0;
    double jaccard1 = 0.0;
    double ochiai = 0.0;

    std::vector<double> as_vector() const { return {tfidf_cos, tf_cos, bm25_cos, jaccard1, ochiai}; }
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

// All five metrics between two token multisets. Any metric with an empty
// operand is 0; identical non-empty operands give 1 on every metric.
SimilarityFeatures similarity_features(const TermCounts& x, const TermCounts& y,
                                       const IdfTable& idf, const Bm25Params& bm25 = {});

double cosine(const TermVector& a, const TermVector& b);

TermVector tf_vector(const TermCounts& counts);
TermVector tfidf_vector(const TermCounts& counts, const IdfTable& idf);
TermVector bm25_vector(const TermCounts& counts, const IdfTable& idf, const Bm25Params& params);

}  // namespace cigmatch::termsim
