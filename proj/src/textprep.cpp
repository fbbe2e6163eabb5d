#include "cigmatch/textprep.hpp"

#include <cctype>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cigmatch::textprep {

namespace {

// Decodes one UTF-8 code point starting at `i`; advances `i` past it.
// Invalid bytes are consumed one at a time and returned as-is.
char32_t next_codepoint(const std::string& s, std::size_t& i) {
    unsigned char c = s[i];
    if (c < 0x80) {
        ++i;
        return c;
    }
    int extra = 0;
    char32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
        cp = c & 0x1F;
        extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
        cp = c & 0x0F;
        extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
        cp = c & 0x07;
        extra = 3;
    } else {
        ++i;
        return c;
    }
    if (i + extra >= s.size()) {
        ++i;
        return c;
    }
    std::size_t j = i + 1;
    for (int k = 0; k < extra; ++k, ++j) {
        unsigned char cc = s[j];
        if ((cc & 0xC0) != 0x80) {
            ++i;
            return c;
        }
        cp = (cp << 6) | (cc & 0x3F);
    }
    i = j;
    return cp;
}

void append_codepoint(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_sentence_terminator(char32_t cp) {
    switch (cp) {
        case U'.':
        case U'!':
        case U'?':
        case U'；':
        case U'。':
        case U'！':
        case U'？':
            return true;
        default:
            return false;
    }
}

bool is_cjk(char32_t cp) {
    return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
           (cp >= 0xF900 && cp <= 0xFAFF);
}

bool is_word_char(char32_t cp) {
    if (cp < 0x80) return std::isalnum(static_cast<unsigned char>(cp)) != 0;
    // Everything non-ASCII except CJK punctuation counts as a word character.
    switch (cp) {
        case U'，':
        case U'。':
        case U'、':
        case U'；':
        case U'：':
        case U'！':
        case U'？':
        case U'“':
        case U'”':
        case U'（':
        case U'）':
        case U'《':
        case U'》':
        case U'【':
        case U'】':
            return false;
        default:
            return true;
    }
}

// True when the segment holds nothing beyond whitespace and sentence-final
// punctuation (e.g. "..." yields three such segments, all dropped).
bool all_whitespace(const std::string& s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const char32_t cp = next_codepoint(s, i);
        if (cp < 128 && std::isspace(static_cast<int>(cp))) continue;
        if (is_sentence_terminator(cp)) continue;
        return false;
    }
    return true;
}

const std::unordered_set<std::string>& stopword_set() {
    static const std::unordered_set<std::string> words = {
        "a", "an", "the", "is", "are", "was", "were", "be", "been", "being",
        "have", "has", "had", "do", "does", "did", "will", "would", "could",
        "should", "may", "might", "can", "must", "shall", "and", "or", "but",
        "nor", "not", "so", "yet", "for", "of", "in", "to", "with", "at",
        "by", "from", "on", "as", "if", "that", "this", "these", "those",
        "it", "its", "he", "she", "they", "we", "you", "i", "their", "his",
        "her", "our", "my", "your", "who", "whom", "which", "what", "where",
        "when", "why", "how", "all", "each", "every", "both", "few", "more",
        "most", "other", "some", "such", "than", "too", "very", "just",
        "about", "into", "over", "after", "before", "between", "out", "up",
        "down", "off", "then", "there", "here",
        "的", "了", "和", "是", "在", "我", "有", "他", "这", "中", "大",
        "来", "上", "国", "个", "到", "说", "们", "为", "子", "与", "也",
        "而", "就", "不", "人", "都", "一", "被", "对", "等", "着",
    };
    return words;
}

}  // namespace

Vocabulary::Vocabulary() {
    tokens_.push_back("<oov>");
    index_of_["<oov>"] = 0;
}

int Vocabulary::add(const std::string& token) {
    auto it = index_of_.find(token);
    if (it != index_of_.end()) return it->second;
    int idx = static_cast<int>(tokens_.size());
    tokens_.push_back(token);
    index_of_[token] = idx;
    return idx;
}

int Vocabulary::lookup(const std::string& token) const {
    auto it = index_of_.find(token);
    return it == index_of_.end() ? 0 : it->second;
}

const std::string& Vocabulary::token_at(int index) const {
    return tokens_.at(static_cast<std::size_t>(index));
}

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t start = i;
        char32_t cp = next_codepoint(text, i);
        current.append(text, start, i - start);
        if (is_sentence_terminator(cp)) {
            if (!all_whitespace(current)) {
                std::size_t b = current.find_first_not_of(" \t\r\n");
                std::size_t e = current.find_last_not_of(" \t\r\n");
                out.push_back(current.substr(b, e - b + 1));
            }
            current.clear();
        }
    }
    if (!all_whitespace(current)) {
        std::size_t b = current.find_first_not_of(" \t\r\n");
        std::size_t e = current.find_last_not_of(" \t\r\n");
        out.push_back(current.substr(b, e - b + 1));
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& sentence) {
    std::vector<std::string> tokens;
    std::string current;
    bool saw_whitespace = false;
    std::size_t i = 0;
    auto flush = [&]() {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    std::vector<char32_t> word_cps;  // for the CJK single-token fallback
    while (i < sentence.size()) {
        char32_t cp = next_codepoint(sentence, i);
        if (cp < 0x80 && std::isspace(static_cast<unsigned char>(cp))) {
            saw_whitespace = true;
            flush();
            continue;
        }
        if (!is_word_char(cp)) {
            flush();
            continue;
        }
        if (cp < 0x80) cp = static_cast<char32_t>(std::tolower(static_cast<int>(cp)));
        append_codepoint(current, cp);
        word_cps.push_back(cp);
    }
    flush();

    if (!saw_whitespace && tokens.size() == 1) {
        bool cjk = !word_cps.empty();
        for (char32_t cp : word_cps) {
            if (!is_cjk(cp)) {
                cjk = false;
                break;
            }
        }
        if (cjk && word_cps.size() > 1) {
            tokens.clear();
            for (char32_t cp : word_cps) {
                std::string t;
                append_codepoint(t, cp);
                tokens.push_back(std::move(t));
            }
        }
    }
    return tokens;
}

EmbeddingTable load_embeddings(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embedding file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("embedding file is empty: " + path);
    std::istringstream header(line);
    long count = 0;
    int dim = 0;
    if (!(header >> count >> dim) || count < 0 || dim <= 0) {
        throw std::runtime_error("embedding file line 1: bad header '" + line + "'");
    }

    EmbeddingTable table;
    table.dim = dim;
    table.matrix.assign(vocab.size() * static_cast<std::size_t>(dim), 0.0);

    long line_no = 1;
    long seen = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (all_whitespace(line)) continue;
        ++seen;
        std::istringstream ls(line);
        std::string token;
        ls >> token;
        std::vector<double> values;
        values.reserve(dim);
        double v;
        while (ls >> v) values.push_back(v);
        if (static_cast<int>(values.size()) != dim) {
            throw std::runtime_error("embedding file line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(dim) + " values, got " +
                                     std::to_string(values.size()));
        }
        if (vocab.contains(token)) {
            int idx = vocab.lookup(token);
            if (idx != 0) {
                std::copy(values.begin(), values.end(),
                          table.matrix.begin() + static_cast<std::size_t>(idx) * dim);
            }
        }
    }
    if (seen != count) {
        throw std::runtime_error("embedding file: header declares " + std::to_string(count) +
                                 " rows, file has " + std::to_string(seen));
    }
    return table;
}

EmbeddingTable synthesize_embeddings(const Vocabulary& vocab, int dim, std::uint64_t seed) {
    EmbeddingTable table;
    table.dim = dim;
    table.matrix.assign(vocab.size() * static_cast<std::size_t>(dim), 0.0);
    for (std::size_t idx = 1; idx < vocab.size(); ++idx) {
        // Token spelling, not vocabulary order, decides the row, so the same
        // token always embeds identically.
        std::uint64_t h = seed;
        for (char c : vocab.token_at(static_cast<int>(idx))) {
            h = (h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c))) * 0x100000001B3ULL;
        }
        std::mt19937_64 rng(h);
        std::uniform_real_distribution<double> uni(-0.5, 0.5);
        for (int d = 0; d < dim; ++d) {
            table.matrix[idx * dim + d] = uni(rng);
        }
    }
    return table;
}

bool is_stopword(const std::string& token) { return stopword_set().count(token) > 0; }

Document make_document(std::string id, const std::string& text) {
    Document doc;
    doc.id = std::move(id);
    for (const std::string& sent : split_sentences(text)) {
        std::vector<std::string> toks = tokenize(sent);
        if (!toks.empty()) doc.sentences.push_back(std::move(toks));
    }
    return doc;
}

}  // namespace cigmatch::textprep
