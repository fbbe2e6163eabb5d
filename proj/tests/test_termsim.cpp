#include <doctest.h>

#include <cmath>
#include <random>

#include "cigmatch/termsim.hpp"
#include "oracles.hpp"

using namespace cigmatch::termsim;

namespace {

TermCounts counts(std::initializer_list<std::pair<const char*, int>> items) {
    TermCounts c;
    for (const auto& [t, n] : items) c[t] = n;
    return c;
}

}  // namespace

TEST_CASE("idf_table smoothed values") {
    std::vector<TermCounts> corpus{counts({{"t", 1}, {"x", 1}}),
                                   counts({{"t", 1}}),
                                   counts({{"t", 2}, {"y", 1}})};
    IdfTable idf(corpus);
    // t in every doc of N=3
    CHECK(idf.idf("t") == doctest::Approx(1.0).epsilon(1e-12));
    // x in 1 of 3 docs
    CHECK(idf.idf("x") == doctest::Approx(std::log(4.0 / 2.0) + 1.0).epsilon(1e-12));
    // unseen
    CHECK(idf.idf("nope") == doctest::Approx(std::log(4.0) + 1.0).epsilon(1e-12));
    // strictly positive always
    CHECK(idf.idf("t") > 0.0);
}

TEST_CASE("idf_table single-document corpus") {
    IdfTable idf({counts({{"t", 3}})});
    CHECK(idf.idf("t") == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("similarity_features identity and empty rules") {
    IdfTable idf({counts({{"a", 1}, {"b", 1}, {"c", 1}})});
    auto x = counts({{"a", 2}, {"b", 1}});

    SUBCASE("identical operands give exactly 1 everywhere") {
        auto f = similarity_features(x, x, idf);
        CHECK(f.tfidf_cos == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.tf_cos == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.bm25_cos == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.jaccard1 == 1.0);
        CHECK(f.ochiai == 1.0);
    }
    SUBCASE("empty side gives all zeros") {
        auto f = similarity_features(x, {}, idf);
        CHECK(f.tfidf_cos == 0.0);
        CHECK(f.tf_cos == 0.0);
        CHECK(f.bm25_cos == 0.0);
        CHECK(f.jaccard1 == 0.0);
        CHECK(f.ochiai == 0.0);
    }
}

TEST_CASE("jaccard and ochiai hand-computed") {
    // Uniform idf (every token in one doc each of a symmetric corpus).
    IdfTable idf({counts({{"a", 1}}), counts({{"b", 1}}), counts({{"c", 1}}), counts({{"d", 1}})});
    auto f = similarity_features(counts({{"a", 1}, {"b", 1}, {"c", 1}}),
                                 counts({{"b", 1}, {"c", 1}, {"d", 1}}), idf);
    CHECK(f.jaccard1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.ochiai == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("five metrics match the brute-force oracle on random multisets") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> vocab(0, 11);
    std::uniform_int_distribution<int> len(0, 14);
    std::uniform_int_distribution<int> count(1, 4);

    // One shared idf table per run of pairs.
    std::vector<TermCounts> corpus;
    for (int i = 0; i < 6; ++i) {
        TermCounts c;
        const int l = 1 + len(rng);
        for (int j = 0; j < l; ++j) c["w" + std::to_string(vocab(rng))] += count(rng);
        corpus.push_back(std::move(c));
    }
    IdfTable idf(corpus);

    for (int trial = 0; trial < 220; ++trial) {
        TermCounts x, y;
        const int lx = len(rng), ly = len(rng);
        for (int j = 0; j < lx; ++j) x["w" + std::to_string(vocab(rng))] += count(rng);
        for (int j = 0; j < ly; ++j) y["w" + std::to_string(vocab(rng))] += count(rng);

        auto f = similarity_features(x, y, idf);
        std::map<std::string, int> ox(x.begin(), x.end()), oy(y.begin(), y.end());
        auto want = oracles::brute_similarities(
            ox, oy, [&](const std::string& t) { return idf.idf(t); }, idf.avg_doc_len());

        CHECK(f.tfidf_cos == doctest::Approx(want.tfidf_cos).epsilon(1e-9));
        CHECK(f.tf_cos == doctest::Approx(want.tf_cos).epsilon(1e-9));
        CHECK(f.bm25_cos == doctest::Approx(want.bm25_cos).epsilon(1e-9));
        CHECK(f.jaccard1 == doctest::Approx(want.jaccard1).epsilon(1e-9));
        CHECK(f.ochiai == doctest::Approx(want.ochiai).epsilon(1e-9));

        // Properties: symmetry, bounds, jaccard <= ochiai.
        auto g = similarity_features(y, x, idf);
        CHECK(f.tfidf_cos == g.tfidf_cos);
        CHECK(f.tf_cos == g.tf_cos);
        CHECK(f.bm25_cos == g.bm25_cos);
        CHECK(f.jaccard1 == g.jaccard1);
        CHECK(f.ochiai == g.ochiai);
        for (double v : f.as_vector()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0 + 1e-12);
        }
        CHECK(f.jaccard1 <= f.ochiai + 1e-12);
    }
}
