#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wechsel/subword.hpp"
#include "wechsel/topk.hpp"
#include "wechsel/vectors_io.hpp"

namespace wechsel {

struct TransferConfig {
    int k = 10;
    double tau = 0.1;
    std::uint64_t seed = 42;

    enum class Fallback { MomentMatchedNormal } fallback = Fallback::MomentMatchedNormal;

    void validate() const;  // throws ParseError on k < 1 or tau <= 0
};

struct Neighbor {
    std::uint32_t src_id;
    double score;  // cosine in [-1, 1]
};

// Up to k source neighbors per target token, scores descending, ties toward
// the lower source id. Flagged target tokens have empty neighborhoods.
struct SimilarityNeighborhood {
    std::vector<std::vector<Neighbor>> per_token;
    std::size_t src_vocab_size = 0;

    std::size_t size() const { return per_token.size(); }
};

double cosine(std::span<const float> u, std::span<const float> v);
double cosine(std::span<const double> u, std::span<const double> v);

SimilarityNeighborhood top_k_neighbors(const SubwordStaticEmbeddings& tgt,
                                       const SubwordStaticEmbeddings& src, int k,
                                       int threads = 0);

// Max-subtracted exp(s/tau), normalized to sum 1.
std::vector<double> softmax_weights(std::span<const double> scores, double tau);

// Per-dimension mean and standard deviation over the rows of a matrix.
struct RowMoments {
    std::vector<double> mean;
    std::vector<double> stddev;
};
RowMoments row_moments(const MatF& m);

// Convex combination of neighbor embeddings; tokens with empty neighborhoods
// draw each coordinate from N(mean_j, var_j) of the source matrix via a
// counter-based generator keyed by (seed, token id, dim).
TokenEmbeddingMatrix wechsel_initialize(const TokenEmbeddingMatrix& src,
                                        const TokenizerVocab& tgt_vocab,
                                        const SimilarityNeighborhood& nbh,
                                        const TransferConfig& cfg, int threads = 0,
                                        std::size_t* fallback_count = nullptr);

// Every row drawn from the source matrix's moment-matched normal.
TokenEmbeddingMatrix transinner_initialize(const TokenEmbeddingMatrix& src,
                                           const TokenizerVocab& tgt_vocab,
                                           const TransferConfig& cfg, int threads = 0);

// Every row is a copy of a uniformly drawn source row (with replacement).
TokenEmbeddingMatrix shuffle_initialize(const TokenEmbeddingMatrix& src,
                                        const TokenizerVocab& tgt_vocab,
                                        const TransferConfig& cfg, int threads = 0);

// Text export, one line per target token: "tgt<TAB>src:score,src:score,...".
void write_neighborhood_text(std::ostream& out, const SimilarityNeighborhood& nbh,
                             const TokenizerVocab& tgt_vocab, const TokenizerVocab& src_vocab);

// Parsed form of the text export (token strings, not ids).
struct NeighborhoodText {
    std::vector<std::string> tgt_tokens;
    std::vector<std::vector<std::pair<std::string, double>>> neighbors;
};
NeighborhoodText read_neighborhood_text(std::istream& in);

}  // namespace wechsel
