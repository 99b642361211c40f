#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wechsel/matrix.hpp"

namespace wechsel {

struct FastTextWord {
    std::string word;
    std::int64_t count = 0;
};

// Parsed fastText binary model. Only what the n-gram pipeline needs is kept:
// hyperparameters, the word table, and the input matrix (word rows followed
// by hashed n-gram bucket rows).
struct FastTextModel {
    std::int32_t dim = 0;
    std::int32_t minn = 0;
    std::int32_t maxn = 0;
    std::int32_t bucket = 0;
    std::vector<FastTextWord> words;
    MatF input;  // (nwords + bucket) x dim

    std::size_t nwords() const { return words.size(); }
};

FastTextModel parse_fasttext_model(std::istream& in);

// FNV-1a over raw bytes: h = 2166136261; h = (h ^ byte) * 16777619 per byte.
std::uint32_t fnv1a_hash(std::string_view bytes);

// All contiguous substrings of "<word>" whose length in Unicode scalars lies
// in [minn, maxn]; position-major, shortest first at each position.
std::vector<std::string> extract_ngrams(std::string_view word, int minn, int maxn);

// Bucket row for an n-gram: input[nwords + fnv1a(gram) % bucket].
std::span<const float> ngram_vector(const FastTextModel& model, std::string_view gram);

}  // namespace wechsel
