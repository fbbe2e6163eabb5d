#pragma once

#include <cstdint>
#include <vector>

#include "cigmatch/data.hpp"
#include "cigmatch/model.hpp"

namespace cigmatch::baselines {

struct BaselineResult {
    double accuracy = 0.0;
    double f1 = 0.0;
    double threshold = 0.0;  // bm25 only
};

// Symmetric BM25-weighted cosine between whole documents, thresholded; the
// threshold is picked on the dev split by maximizing accuracy over observed
// scores, then applied to test.
BaselineResult bm25_classify(const data::DatasetSplit& ds);

// The five global similarity features fed to the same classifier head as the
// main model (linear -> 16 -> ReLU -> linear -> 1 -> sigmoid), trained with
// the same optimizer settings.
BaselineResult simnet_classify(const data::DatasetSplit& ds, int epochs = 10, int batch = 32,
                               std::uint64_t seed = 42);

}  // namespace cigmatch::baselines
