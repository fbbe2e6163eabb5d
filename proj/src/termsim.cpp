#include "cigmatch/termsim.hpp"

#include <algorithm>
#include <cmath>
#include <string_view>

namespace cigmatch::termsim {

TermCounts count_terms(const std::vector<std::string>& tokens) {
    TermCounts counts;
    for (const auto& t : tokens) ++counts[t];
    return counts;
}

IdfTable::IdfTable(const std::vector<TermCounts>& corpus) {
    corpus_size_ = corpus.size();
    const double n = static_cast<double>(corpus_size_);
    std::unordered_map<std::string, int> df;
    double total_len = 0.0;
    for (const auto& doc : corpus) {
        for (const auto& [tok, count] : doc) {
            ++df[tok];
            total_len += count;
        }
    }
    for (const auto& [tok, d] : df) {
        idf_[tok] = std::log((n + 1.0) / (d + 1.0)) + 1.0;
    }
    default_idf_ = std::log(n + 1.0) + 1.0;
    avg_doc_len_ = corpus.empty() ? 1.0 : std::max(1.0, total_len / n);
}

double IdfTable::idf(const std::string& token) const {
    auto it = idf_.find(token);
    return it == idf_.end() ? default_idf_ : it->second;
}

void IdfTable::set(std::unordered_map<std::string, double> idf, double avg_len, std::size_t n) {
    idf_ = std::move(idf);
    avg_doc_len_ = avg_len;
    corpus_size_ = n;
    default_idf_ = std::log(static_cast<double>(n) + 1.0) + 1.0;
}

double cosine(const TermVector& a, const TermVector& b) {
    if (a.empty() || b.empty()) return 0.0;
    const TermVector& small = a.size() <= b.size() ? a : b;
    const TermVector& large = a.size() <= b.size() ? b : a;
    // Accumulate shared terms in sorted order so the result is bitwise
    // symmetric in its arguments.
    std::vector<std::pair<std::string_view, double>> common;
    for (const auto& [tok, w] : small) {
        auto it = large.find(tok);
        if (it != large.end()) common.emplace_back(tok, w * it->second);
    }
    std::sort(common.begin(), common.end());
    double dot = 0.0;
    for (const auto& [tok, p] : common) dot += p;
    double na = 0.0, nb = 0.0;
    for (const auto& [tok, w] : a) na += w * w;
    for (const auto& [tok, w] : b) nb += w * w;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

TermVector tf_vector(const TermCounts& counts) {
    TermVector v;
    for (const auto& [tok, c] : counts) {
        if (c != 0) v[tok] = static_cast<double>(c);
    }
    return v;
}

TermVector tfidf_vector(const TermCounts& counts, const IdfTable& idf) {
    TermVector v;
    for (const auto& [tok, c] : counts) {
        if (c != 0) v[tok] = static_cast<double>(c) * idf.idf(tok);
    }
    return v;
}

TermVector bm25_vector(const TermCounts& counts, const IdfTable& idf, const Bm25Params& params) {
    double len = 0.0;
    for (const auto& [tok, c] : counts) len += c;
    const double norm = params.k1 * (1.0 - params.b + params.b * len / idf.avg_doc_len());
    TermVector v;
    for (const auto& [tok, c] : counts) {
        if (c == 0) continue;
        const double tf = static_cast<double>(c);
        v[tok] = idf.idf(tok) * tf * (params.k1 + 1.0) / (tf + norm);
    }
    return v;
}

SimilarityFeatures similarity_features(const TermCounts& x, const TermCounts& y,
                                       const IdfTable& idf, const Bm25Params& bm25) {
    SimilarityFeatures f;
    if (x.empty() || y.empty()) return f;

    f.tf_cos = cosine(tf_vector(x), tf_vector(y));
    f.tfidf_cos = cosine(tfidf_vector(x, idf), tfidf_vector(y, idf));
    f.bm25_cos = cosine(bm25_vector(x, idf, bm25), bm25_vector(y, idf, bm25));

    std::size_t inter = 0;
    for (const auto& [tok, c] : x) {
        if (y.count(tok)) ++inter;
    }
    const std::size_t uni = x.size() + y.size() - inter;
    f.jaccard1 = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
    f.ochiai = static_cast<double>(inter) /
               std::sqrt(static_cast<double>(x.size()) * static_cast<double>(y.size()));
    return f;
}

}  // namespace cigmatch::termsim
