#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "wechsel/bpe.hpp"
#include "wechsel/fasttext.hpp"
#include "wechsel/matrix.hpp"
#include "wechsel/vectors_io.hpp"

namespace wechsel {

// Static vectors per tokenizer token, in word-embedding space. zero_flag[i]
// marks tokens with no embedding evidence; such rows are exactly zero.
struct SubwordStaticEmbeddings {
    TokenizerVocab vocab;
    MatF matrix;
    std::vector<std::uint8_t> zero_flag;

    std::size_t dim() const { return matrix.cols(); }
};

struct TokenEmbeddingResult {
    std::vector<float> vector;
    bool is_zero = false;  // tracks evidence, not the numeric value
};

// Sum of bucket vectors over the surface's n-grams. The caller passes the
// surface with the leading space already stripped.
TokenEmbeddingResult token_embedding_ngram(const FastTextModel& model,
                                           std::string_view surface, int minn, int maxn);

// One row per vocab token: recover the surface, strip one leading space,
// then n-gram-sum with the model's own minn/maxn.
SubwordStaticEmbeddings compute_subword_embeddings_ngram(const ByteLevelBpe& tok,
                                                         const FastTextModel& model,
                                                         int threads = 0);

// Per token id: the words whose tokenization contains that token, with their
// frequencies. A word is listed at most once per token.
struct TokenOccurrenceIndex {
    std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> by_token;
    std::size_t words_skipped = 0;  // words the tokenizer could not encode

    std::size_t vocab_size() const { return by_token.size(); }
};

TokenOccurrenceIndex build_occurrence_index(const WordVectors& words, const ByteLevelBpe& tok,
                                            bool prefix_space, int threads = 0);

// Frequency-weighted mean of containing-word vectors (tokenize-flatten-reduce).
SubwordStaticEmbeddings compute_subword_embeddings_tfr(const TokenOccurrenceIndex& index,
                                                       const WordVectors& words,
                                                       const TokenizerVocab& vocab,
                                                       int threads = 0);

}  // namespace wechsel
