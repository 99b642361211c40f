#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wechsel/matrix.hpp"

namespace wechsel {

// Static word embeddings: one row per word, optional frequency counts.
struct WordVectors {
    std::vector<std::string> words;
    MatF vectors;
    std::optional<std::vector<std::uint64_t>> counts;
    std::unordered_map<std::string, std::uint32_t> index;

    std::size_t size() const { return words.size(); }
    std::size_t dim() const { return vectors.cols(); }
    // -1 when absent.
    std::int64_t find(std::string_view word) const;

    void rebuild_index();
};

struct BilingualDictionary {
    std::vector<std::pair<std::string, std::string>> pairs;  // (source, target)
};

// Dense token id space: ids are 0..size-1 in `tokens` order.
struct TokenizerVocab {
    std::vector<std::string> tokens;
    std::unordered_map<std::string, std::uint32_t> id_of;

    std::size_t size() const { return tokens.size(); }
    std::int64_t find(std::string_view token) const;

    static TokenizerVocab from_tokens(std::vector<std::string> tokens);
};

struct TokenEmbeddingMatrix {
    TokenizerVocab vocab;
    MatF matrix;  // |vocab| x d_model

    std::size_t dim() const { return matrix.cols(); }
};

// --- text word-vector format ("V d" header, then "word v1 ... vd" lines) ---

WordVectors load_word_vectors(std::istream& in,
                              std::optional<std::size_t> limit = std::nullopt);
void save_word_vectors(std::ostream& out, const WordVectors& wv);

// Word-frequency sidecar: lines of "word count". Words absent from the file
// keep count 0.
void attach_frequencies(WordVectors& wv, std::istream& in);
void attach_uniform_frequencies(WordVectors& wv);

// --- bilingual dictionary (two whitespace-separated fields per line) ---

BilingualDictionary load_dictionary(std::istream& in);

// --- binary embedding-matrix format ---
//
// One JSON header line {"vocab_size":V,"dim":d,"dtype":"f32","order":"row-major"}
// (plus optional "kind"), V escaped token lines, then V*d little-endian f32.
// Writing is canonical: write(read(write(x))) is byte-identical.

struct MatrixFile {
    TokenEmbeddingMatrix embedding;
    std::string kind;                              // "" when absent
    std::optional<std::vector<std::uint8_t>> zero_flags;  // present iff kind=="subword-static"
};

void write_matrix(std::ostream& out, const TokenEmbeddingMatrix& m,
                  std::string_view kind = {},
                  const std::vector<std::uint8_t>* zero_flags = nullptr);
MatrixFile read_matrix(std::istream& in);

// Plain-text export in the word-vector layout ("V d" header). Tokens have
// newline/backslash/space escaped so lines stay splittable.
void write_matrix_text(std::ostream& out, const TokenEmbeddingMatrix& m);

// --- token escaping shared by the formats above ---

std::string escape_token(std::string_view token);
std::string unescape_token(std::string_view line);

// --- tokenizer vocab JSON (token -> id object, ids dense) ---

TokenizerVocab load_vocab_json(std::istream& in);

}  // namespace wechsel
