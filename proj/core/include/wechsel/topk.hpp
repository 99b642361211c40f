#pragma once

#include <cstdint>
#include <vector>

#include "wechsel/matrix.hpp"

namespace wechsel {

struct ScoredId {
    std::uint32_t id;
    double score;
};

// Exact top-k cosine search: for every query row, the k candidate rows with
// the highest cosine similarity, ties broken toward the lower candidate id.
// Rows flagged in `*_skip` (and zero-norm rows) are excluded: skipped queries
// get empty results, skipped candidates are never retrieved.
//
// Blocked evaluation over unit-normalized copies; double accumulation.
// Parallel over query blocks only, so results are thread-count independent.
std::vector<std::vector<ScoredId>> topk_cosine(const MatF& queries,
                                               const std::vector<std::uint8_t>* query_skip,
                                               const MatF& candidates,
                                               const std::vector<std::uint8_t>* candidate_skip,
                                               int k, int threads = 0);

}  // namespace wechsel
