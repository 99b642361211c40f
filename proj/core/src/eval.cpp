#include "wechsel/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wechsel/error.hpp"
#include "wechsel/rng.hpp"
#include "wechsel/topk.hpp"

namespace wechsel {

MatD random_orthogonal(std::size_t d, std::uint64_t seed) {
    SplitMix64 rng(seed);
    MatD g(d, d);
    for (std::size_t i = 0; i < d * d; ++i) g.data()[i] = rng.next_normal();

    // modified Gram-Schmidt over rows, two passes for orthogonality
    for (std::size_t i = 0; i < d; ++i) {
        auto ri = g.row(i);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < i; ++k) {
                auto rk = g.row(k);
                double dot = 0.0;
                for (std::size_t j = 0; j < d; ++j) dot += ri[j] * rk[j];
                for (std::size_t j = 0; j < d; ++j) ri[j] -= dot * rk[j];
            }
        }
        double norm = std::sqrt(std::inner_product(ri.begin(), ri.end(), ri.begin(), 0.0));
        if (norm == 0.0) norm = 1.0;  // measure-zero; keeps the routine total
        for (std::size_t j = 0; j < d; ++j) ri[j] /= norm;
    }
    return g;
}

namespace {

std::vector<std::uint32_t> random_permutation(std::size_t n, SplitMix64& rng) {
    std::vector<std::uint32_t> pi(n);
    std::iota(pi.begin(), pi.end(), 0);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = rng.next_index(i);
        std::swap(pi[i - 1], pi[j]);
    }
    return pi;
}

void unit_normalize_rows(MatF& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        double n2 = 0.0;
        for (float f : r) n2 += static_cast<double>(f) * f;
        if (n2 == 0.0) continue;
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& f : r) f = static_cast<float>(f * inv);
    }
}

std::vector<std::string> numbered_tokens(char prefix, std::size_t n) {
    std::vector<std::string> tokens(n);
    for (std::size_t i = 0; i < n; ++i) tokens[i] = prefix + std::to_string(i);
    return tokens;
}

}  // namespace

SyntheticPair generate_synthetic_pair(std::uint64_t seed, std::size_t vocab_size,
                                      std::size_t static_dim, std::size_t model_dim,
                                      double noise, std::size_t dict_pairs) {
    if (vocab_size < 2) throw ParseError("synthetic pair: vocab size must be >= 2");
    if (noise < 0.0) throw ParseError("synthetic pair: noise must be >= 0");

    SplitMix64 rng(seed);
    SyntheticPair sp;
    sp.noise = noise;

    // source static vectors: unit-normalized Gaussian rows
    MatF u_src(vocab_size, static_dim);
    for (std::size_t i = 0; i < u_src.size(); ++i)
        u_src.data()[i] = static_cast<float>(rng.next_normal());
    unit_normalize_rows(u_src);

    sp.rotation = random_orthogonal(static_dim, rng.next_u64());
    sp.permutation = random_permutation(vocab_size, rng);

    // target vector i = unit(u[pi(i)] * R + eps)
    MatF u_tgt(vocab_size, static_dim);
    std::vector<double> tmp(static_dim);
    for (std::size_t i = 0; i < vocab_size; ++i) {
        auto srow = u_src.row(sp.permutation[i]);
        std::fill(tmp.begin(), tmp.end(), 0.0);
        for (std::size_t p = 0; p < static_dim; ++p) {
            const double x = srow[p];
            for (std::size_t j = 0; j < static_dim; ++j) tmp[j] += x * sp.rotation.at(p, j);
        }
        auto drow = u_tgt.row(i);
        for (std::size_t j = 0; j < static_dim; ++j)
            drow[j] = static_cast<float>(tmp[j] + noise * rng.next_normal());
    }
    unit_normalize_rows(u_tgt);

    const auto src_names = numbered_tokens('s', vocab_size);
    const auto tgt_names = numbered_tokens('t', vocab_size);

    sp.src_static.vocab = TokenizerVocab::from_tokens(src_names);
    sp.src_static.matrix = u_src;
    sp.src_static.zero_flag.assign(vocab_size, 0);

    sp.tgt_static.vocab = TokenizerVocab::from_tokens(tgt_names);
    sp.tgt_static.matrix = u_tgt;
    sp.tgt_static.zero_flag.assign(vocab_size, 0);

    sp.src_words.words = src_names;
    sp.src_words.vectors = u_src;
    sp.src_words.rebuild_index();
    sp.tgt_words.words = tgt_names;
    sp.tgt_words.vectors = u_tgt;
    sp.tgt_words.rebuild_index();

    // model-space embeddings and the permuted oracle
    sp.e_src.vocab = sp.src_static.vocab;
    sp.e_src.matrix = MatF(vocab_size, model_dim);
    for (std::size_t i = 0; i < sp.e_src.matrix.size(); ++i)
        sp.e_src.matrix.data()[i] = static_cast<float>(rng.next_normal());

    sp.e_oracle.vocab = sp.tgt_static.vocab;
    sp.e_oracle.matrix = MatF(vocab_size, model_dim);
    for (std::size_t i = 0; i < vocab_size; ++i) {
        auto s = sp.e_src.matrix.row(sp.permutation[i]);
        std::copy(s.begin(), s.end(), sp.e_oracle.matrix.row(i).begin());
    }

    // dictionary over a random token subset: (source word pi(i), target word i)
    const auto picks = random_permutation(vocab_size, rng);
    const auto n_dict = std::min(dict_pairs, vocab_size);
    for (std::size_t t = 0; t < n_dict; ++t) {
        const auto i = picks[t];
        sp.dictionary.pairs.emplace_back(src_names[sp.permutation[i]], tgt_names[i]);
    }
    return sp;
}

double top1_recovery(const SimilarityNeighborhood& nbh,
                     std::span<const std::uint32_t> permutation) {
    if (nbh.size() != permutation.size())
        throw DimensionError("top1_recovery: neighborhood count != permutation size");
    if (nbh.size() == 0) return 0.0;

    std::size_t hits = 0;
    for (std::size_t i = 0; i < nbh.size(); ++i)
        if (!nbh.per_token[i].empty() && nbh.per_token[i][0].src_id == permutation[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(nbh.size());
}

BliResult bli_precision_at_1(const WordVectors& src, const WordVectors& tgt_aligned,
                             const BilingualDictionary& heldout, int threads) {
    if (src.dim() != tgt_aligned.dim())
        throw DimensionError("bli: source dim != target dim");

    // unique in-vocab target queries, then one exact search for all of them
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // (src idx, tgt idx)
    for (const auto& [sw, tw] : heldout.pairs) {
        const auto si = src.find(sw);
        const auto ti = tgt_aligned.find(tw);
        if (si >= 0 && ti >= 0)
            pairs.emplace_back(static_cast<std::uint32_t>(si), static_cast<std::uint32_t>(ti));
    }
    if (pairs.empty())
        throw NoUsablePairsError("bli: no held-out pair is covered by both vocabularies");

    std::vector<std::uint32_t> query_ids;
    std::unordered_map<std::uint32_t, std::uint32_t> query_slot;
    for (const auto& [si, ti] : pairs)
        if (query_slot.emplace(ti, static_cast<std::uint32_t>(query_ids.size())).second)
            query_ids.push_back(ti);

    MatF queries(query_ids.size(), src.dim());
    for (std::size_t q = 0; q < query_ids.size(); ++q) {
        auto r = tgt_aligned.vectors.row(query_ids[q]);
        std::copy(r.begin(), r.end(), queries.row(q).begin());
    }

    auto hits = topk_cosine(queries, nullptr, src.vectors, nullptr, 1, threads);

    std::size_t correct = 0;
    for (const auto& [si, ti] : pairs) {
        const auto& best = hits[query_slot.at(ti)];
        if (!best.empty() && best[0].id == si) ++correct;
    }
    return {static_cast<double>(correct) / static_cast<double>(pairs.size()), pairs.size()};
}

std::string nearest_report(const SimilarityNeighborhood& nbh, const TokenizerVocab& src_vocab,
                           const TokenizerVocab& tgt_vocab, std::size_t n,
                           std::uint64_t sample_seed) {
    if (nbh.size() != tgt_vocab.size())
        throw DimensionError("nearest_report: neighborhood count != target vocab size");
    if (nbh.src_vocab_size != src_vocab.size())
        throw DimensionError("nearest_report: source vocab size mismatch");

    std::vector<std::uint32_t> ids(nbh.size());
    std::iota(ids.begin(), ids.end(), 0);
    if (n < ids.size()) {
        SplitMix64 rng(sample_seed);
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = i + rng.next_index(ids.size() - i);
            std::swap(ids[i], ids[j]);
        }
        ids.resize(n);
    }

    std::ostringstream out;
    char buf[32];
    for (auto id : ids) {
        out << escape_token(tgt_vocab.tokens[id]) << '\t';
        if (nbh.per_token[id].empty()) {
            out << "-\t-\n";
            continue;
        }
        const auto& top = nbh.per_token[id][0];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), top.score,
                                       std::chars_format::fixed, 4);
        out << escape_token(src_vocab.tokens[top.src_id]) << '\t';
        out.write(buf, ptr - buf);
        out << '\n';
    }
    return out.str();
}

double init_quality(const TokenEmbeddingMatrix& candidate, const TokenEmbeddingMatrix& oracle) {
    if (candidate.matrix.rows() != oracle.matrix.rows() ||
        candidate.matrix.cols() != oracle.matrix.cols())
        throw DimensionError("init_quality: shapes differ");
    if (candidate.matrix.rows() == 0) return 0.0;

    double sum = 0.0;
    for (std::size_t i = 0; i < candidate.matrix.rows(); ++i) {
        auto a = candidate.matrix.row(i);
        auto b = oracle.matrix.row(i);
        double aa = 0.0, bb = 0.0, ab = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            aa += static_cast<double>(a[j]) * a[j];
            bb += static_cast<double>(b[j]) * b[j];
            ab += static_cast<double>(a[j]) * b[j];
        }
        if (aa > 0.0 && bb > 0.0) sum += ab / (std::sqrt(aa) * std::sqrt(bb));
    }
    return sum / static_cast<double>(candidate.matrix.rows());
}

}  // namespace wechsel
