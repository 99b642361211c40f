#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wechsel/matrix.hpp"
#include "wechsel/procrustes.hpp"
#include "wechsel/subword.hpp"
#include "wechsel/transfer.hpp"
#include "wechsel/vectors_io.hpp"

namespace wechsel {

// Two synthetic "languages": target static vectors are rotated, noised,
// renormalized copies of permuted source vectors. The oracle embedding
// matrix is the source matrix with rows permuted the same way.
struct SyntheticPair {
    SubwordStaticEmbeddings src_static;
    SubwordStaticEmbeddings tgt_static;       // in target space (not yet aligned)
    std::vector<std::uint32_t> permutation;   // pi: target id -> source id
    TokenEmbeddingMatrix e_src;
    TokenEmbeddingMatrix e_oracle;            // e_oracle[i] == e_src[pi[i]]
    BilingualDictionary dictionary;           // (source word, target word) subset
    WordVectors src_words;                    // word-vector view of src_static
    WordVectors tgt_words;                    // word-vector view of tgt_static
    MatD rotation;                            // row-acting ground truth
    double noise = 0.0;
};

SyntheticPair generate_synthetic_pair(std::uint64_t seed, std::size_t vocab_size,
                                      std::size_t static_dim, std::size_t model_dim,
                                      double noise, std::size_t dict_pairs = 200);

// Haar-ish random orthogonal matrix (Gram-Schmidt of a Gaussian draw).
MatD random_orthogonal(std::size_t d, std::uint64_t seed);

// Fraction of target tokens whose top-1 neighbor is pi(i); empty
// neighborhoods count as misses.
double top1_recovery(const SimilarityNeighborhood& nbh,
                     std::span<const std::uint32_t> permutation);

struct BliResult {
    double precision = 0.0;
    std::size_t pairs_used = 0;
};

// Precision@1 of translating held-out target words into source words by
// nearest cosine neighbor; target vectors must already be aligned.
BliResult bli_precision_at_1(const WordVectors& src, const WordVectors& tgt_aligned,
                             const BilingualDictionary& heldout, int threads = 0);

// Appendix-style sample: n random target tokens with their top-1 source
// token and score, one per line.
std::string nearest_report(const SimilarityNeighborhood& nbh, const TokenizerVocab& src_vocab,
                           const TokenizerVocab& tgt_vocab, std::size_t n,
                           std::uint64_t sample_seed);

// Mean cosine between corresponding rows; rows that are zero on either side
// contribute 0.
double init_quality(const TokenEmbeddingMatrix& candidate, const TokenEmbeddingMatrix& oracle);

}  // namespace wechsel
