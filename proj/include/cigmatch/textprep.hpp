#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cigmatch::textprep {

// One article: tokenized sentences plus the keywords extracted for it.
struct Document {
    std::string id;
    std::vector<std::vector<std::string>> sentences;
    std::vector<std::pair<std::string, double>> keywords;
};

// Token <-> index map. Index 0 is reserved for out-of-vocabulary tokens.
class Vocabulary {
public:
    Vocabulary();

    // Returns the existing index or inserts the token and returns the new one.
    int add(const std::string& token);
    // Returns 0 (OOV) for unknown tokens.
    int lookup(const std::string& token) const;
    const std::string& token_at(int index) const;
    bool contains(const std::string& token) const { return index_of_.count(token) > 0; }
    std::size_t size() const { return tokens_.size(); }

    const std::vector<std::string>& tokens() const { return tokens_; }

private:
    std::unordered_map<std::string, int> index_of_;
    std::vector<std::string> tokens_;
};

// Frozen word embeddings, one row per vocabulary index. Row 0 (OOV) is all
// zeros and rows are never updated by training.
struct EmbeddingTable {
    int dim = 0;
    std::vector<double> matrix;  // |V| x dim, row-major

    std::size_t rows() const { return dim == 0 ? 0 : matrix.size() / dim; }
    const double* row(int index) const { return matrix.data() + static_cast<std::size_t>(index) * dim; }
};

std::vector<std::string> split_sentences(const std::string& text);
std::vector<std::string> tokenize(const std::string& sentence);

// Parses the whitespace-delimited embedding text format (header line: count
// and dimension; then one token plus `dim` floats per line). Vocabulary
// tokens absent from the file keep the zero row. Throws std::runtime_error
// naming the offending line on format errors.
EmbeddingTable load_embeddings(const std::string& path, const Vocabulary& vocab);

// Deterministic stand-in when no pre-trained file is available: each known
// token gets a fixed pseudo-random unit-scale row derived from its spelling.
// Row 0 stays zero.
EmbeddingTable synthesize_embeddings(const Vocabulary& vocab, int dim, std::uint64_t seed);

// Small built-in stopword list (English function words plus a few common
// Chinese particles). Used only during keyword extraction.
bool is_stopword(const std::string& token);

// Tokenizes every sentence of `text`; sentences that tokenize to nothing are
// dropped.
Document make_document(std::string id, const std::string& text);

}  // namespace cigmatch::textprep
