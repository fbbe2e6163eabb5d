#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "cigmatch/textprep.hpp"

using namespace cigmatch::textprep;

TEST_CASE("split_sentences on terminators") {
    CHECK(split_sentences("A. B!") == std::vector<std::string>{"A.", "B!"});
    CHECK(split_sentences("").empty());
    CHECK(split_sentences("x y z") == std::vector<std::string>{"x y z"});
    CHECK(split_sentences("第一句。第二句！") == std::vector<std::string>{"第一句。", "第二句！"});
    CHECK(split_sentences("...").empty());
}

TEST_CASE("split_sentences keeps non-punctuation characters in order") {
    const std::string text = "one two. three? four five! six";
    std::string joined;
    for (const auto& s : split_sentences(text)) joined += s;
    std::string expect, got;
    for (char c : text) {
        if (c != '.' && c != '?' && c != '!' && c != ' ') expect.push_back(c);
    }
    for (char c : joined) {
        if (c != '.' && c != '?' && c != '!' && c != ' ') got.push_back(c);
    }
    CHECK(got == expect);
}

TEST_CASE("tokenize basics") {
    CHECK(tokenize("Rick and Morty.") == std::vector<std::string>{"rick", "and", "morty"});
    CHECK(tokenize("A,B") == std::vector<std::string>{"a", "b"});
    CHECK(tokenize("中文分词") == std::vector<std::string>{"中", "文", "分", "词"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("!!!").empty());
}

TEST_CASE("tokenize is idempotent on its own output") {
    for (const std::string text : {"Rick and Morty.", "Hello, WORLD; 42 times", "中文 文本 处理"}) {
        auto once = tokenize(text);
        std::string joined;
        for (std::size_t i = 0; i < once.size(); ++i) {
            if (i) joined += " ";
            joined += once[i];
        }
        CHECK(tokenize(joined) == once);
    }
}

TEST_CASE("vocabulary reserves index 0 for OOV") {
    Vocabulary v;
    CHECK(v.size() == 1);
    CHECK(v.add("alpha") == 1);
    CHECK(v.add("alpha") == 1);
    CHECK(v.lookup("alpha") == 1);
    CHECK(v.lookup("never-seen") == 0);
}

TEST_CASE("load_embeddings") {
    const std::string path = "test_embeddings.txt";
    {
        std::ofstream out(path);
        out << "2 3\na 1 0 0\nb 0 1 0\n";
    }
    Vocabulary vocab;
    vocab.add("a");
    vocab.add("b");
    vocab.add("zzz");

    SUBCASE("rows copied and missing tokens stay zero") {
        EmbeddingTable t = load_embeddings(path, vocab);
        CHECK(t.dim == 3);
        CHECK(t.row(vocab.lookup("a"))[0] == 1.0);
        CHECK(t.row(vocab.lookup("b"))[1] == 1.0);
        const double* z = t.row(vocab.lookup("zzz"));
        CHECK(z[0] == 0.0);
        CHECK(z[1] == 0.0);
        CHECK(z[2] == 0.0);
        // OOV row is all zero
        CHECK(t.row(0)[0] == 0.0);
    }

    SUBCASE("dimension mismatch is a format error naming the line") {
        {
            std::ofstream out(path);
            out << "1 3\na 1 0\n";
        }
        CHECK_THROWS_WITH_AS(load_embeddings(path, vocab),
                             doctest::Contains("line 2"), std::runtime_error);
    }
    std::remove(path.c_str());
}

TEST_CASE("synthesized embeddings are deterministic with zero OOV row") {
    Vocabulary vocab;
    vocab.add("x");
    vocab.add("y");
    auto a = synthesize_embeddings(vocab, 8, 5);
    auto b = synthesize_embeddings(vocab, 8, 5);
    CHECK(a.matrix == b.matrix);
    for (int d = 0; d < 8; ++d) CHECK(a.row(0)[d] == 0.0);
    bool any_nonzero = false;
    for (int d = 0; d < 8; ++d) any_nonzero = any_nonzero || a.row(1)[d] != 0.0;
    CHECK(any_nonzero);
}

TEST_CASE("make_document drops empty sentences") {
    Document doc = make_document("d", "First one. !!! Second one!");
    CHECK(doc.sentences.size() == 2);
    for (const auto& s : doc.sentences) CHECK(!s.empty());
}
