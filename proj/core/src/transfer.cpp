#include "wechsel/transfer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "wechsel/error.hpp"
#include "wechsel/parallel.hpp"
#include "wechsel/rng.hpp"

namespace wechsel {

void TransferConfig::validate() const {
    if (k < 1) throw ParseError("transfer config: k must be >= 1, got " + std::to_string(k));
    if (!(tau > 0.0))
        throw ParseError("transfer config: tau must be > 0, got " + std::to_string(tau));
}

namespace {

template <typename T>
double cosine_impl(std::span<const T> u, std::span<const T> v) {
    if (u.size() != v.size())
        throw DimensionError("cosine: vector sizes differ (" + std::to_string(u.size()) +
                             " vs " + std::to_string(v.size()) + ")");
    double uu = 0.0, vv = 0.0, uv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uu += static_cast<double>(u[i]) * u[i];
        vv += static_cast<double>(v[i]) * v[i];
        uv += static_cast<double>(u[i]) * v[i];
    }
    if (uu == 0.0 || vv == 0.0) throw DimensionError("cosine: zero-norm input");
    return uv / (std::sqrt(uu) * std::sqrt(vv));
}

}  // namespace

double cosine(std::span<const float> u, std::span<const float> v) { return cosine_impl(u, v); }
double cosine(std::span<const double> u, std::span<const double> v) { return cosine_impl(u, v); }

SimilarityNeighborhood top_k_neighbors(const SubwordStaticEmbeddings& tgt,
                                       const SubwordStaticEmbeddings& src, int k,
                                       int threads) {
    if (tgt.dim() != src.dim())
        throw DimensionError("top_k_neighbors: target static dim " + std::to_string(tgt.dim()) +
                             " != source static dim " + std::to_string(src.dim()));

    auto hits = topk_cosine(tgt.matrix, &tgt.zero_flag, src.matrix, &src.zero_flag, k, threads);

    SimilarityNeighborhood nbh;
    nbh.src_vocab_size = src.vocab.size();
    nbh.per_token.resize(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
        nbh.per_token[i].reserve(hits[i].size());
        for (const auto& h : hits[i]) nbh.per_token[i].push_back({h.id, h.score});
    }
    return nbh;
}

std::vector<double> softmax_weights(std::span<const double> scores, double tau) {
    if (scores.empty()) throw ParseError("softmax: empty score list");
    const double max = *std::max_element(scores.begin(), scores.end());
    std::vector<double> w(scores.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        w[i] = std::exp((scores[i] - max) / tau);
        sum += w[i];
    }
    for (auto& x : w) x /= sum;
    return w;
}

RowMoments row_moments(const MatF& m) {
    const std::size_t n = m.rows();
    const std::size_t d = m.cols();
    RowMoments mm;
    mm.mean.assign(d, 0.0);
    mm.stddev.assign(d, 0.0);
    if (n == 0) return mm;

    for (std::size_t i = 0; i < n; ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < d; ++j) mm.mean[j] += r[j];
    }
    for (std::size_t j = 0; j < d; ++j) mm.mean[j] /= static_cast<double>(n);

    for (std::size_t i = 0; i < n; ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double delta = r[j] - mm.mean[j];
            mm.stddev[j] += delta * delta;
        }
    }
    for (std::size_t j = 0; j < d; ++j)
        mm.stddev[j] = std::sqrt(mm.stddev[j] / static_cast<double>(n));
    return mm;
}

namespace {

void fill_fallback_row(std::span<float> row, const RowMoments& mm, std::uint64_t seed,
                       std::size_t token_id) {
    for (std::size_t j = 0; j < row.size(); ++j)
        row[j] = static_cast<float>(mm.mean[j] +
                                    mm.stddev[j] * normal_from_key(seed, token_id, j));
}

}  // namespace

TokenEmbeddingMatrix wechsel_initialize(const TokenEmbeddingMatrix& src,
                                        const TokenizerVocab& tgt_vocab,
                                        const SimilarityNeighborhood& nbh,
                                        const TransferConfig& cfg, int threads,
                                        std::size_t* fallback_count) {
    cfg.validate();
    if (nbh.size() != tgt_vocab.size())
        throw DimensionError("wechsel_initialize: neighborhood count " +
                             std::to_string(nbh.size()) + " != target vocab size " +
                             std::to_string(tgt_vocab.size()));
    if (nbh.src_vocab_size != src.vocab.size())
        throw DimensionError("wechsel_initialize: neighborhood source vocab mismatch");

    const std::size_t d = src.dim();
    TokenEmbeddingMatrix out;
    out.vocab = tgt_vocab;
    out.matrix = MatF(tgt_vocab.size(), d);

    const RowMoments mm = row_moments(src.matrix);
    std::vector<std::uint8_t> fell_back(tgt_vocab.size(), 0);

    parallel_chunks(0, tgt_vocab.size(), threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> scores, acc(d);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& neighbors = nbh.per_token[i];
            auto dst = out.matrix.row(i);

            if (neighbors.empty()) {
                fill_fallback_row(dst, mm, cfg.seed, i);
                fell_back[i] = 1;
                continue;
            }

            scores.clear();
            for (const auto& nb : neighbors) {
                if (nb.src_id >= src.vocab.size())
                    throw DimensionError("wechsel_initialize: neighbor id out of range");
                scores.push_back(nb.score);
            }
            const auto w = softmax_weights(scores, cfg.tau);

            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::size_t t = 0; t < neighbors.size(); ++t) {
                auto er = src.matrix.row(neighbors[t].src_id);
                for (std::size_t j = 0; j < d; ++j) acc[j] += w[t] * er[j];
            }
            for (std::size_t j = 0; j < d; ++j) dst[j] = static_cast<float>(acc[j]);
        }
    });

    if (fallback_count) {
        *fallback_count = 0;
        for (auto f : fell_back) *fallback_count += f;
    }
    return out;
}

TokenEmbeddingMatrix transinner_initialize(const TokenEmbeddingMatrix& src,
                                           const TokenizerVocab& tgt_vocab,
                                           const TransferConfig& cfg, int threads) {
    const RowMoments mm = row_moments(src.matrix);

    TokenEmbeddingMatrix out;
    out.vocab = tgt_vocab;
    out.matrix = MatF(tgt_vocab.size(), src.dim());

    parallel_chunks(0, tgt_vocab.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            fill_fallback_row(out.matrix.row(i), mm, cfg.seed, i);
    });
    return out;
}

TokenEmbeddingMatrix shuffle_initialize(const TokenEmbeddingMatrix& src,
                                        const TokenizerVocab& tgt_vocab,
                                        const TransferConfig& cfg, int threads) {
    if (src.vocab.size() == 0) throw NoUsablePairsError("shuffle: empty source vocabulary");

    TokenEmbeddingMatrix out;
    out.vocab = tgt_vocab;
    out.matrix = MatF(tgt_vocab.size(), src.dim());

    parallel_chunks(0, tgt_vocab.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            // stream tag 2 keeps this draw disjoint from the normal sampler's
            const auto pick = bounded_from_u64(key_hash(cfg.seed, i, 0, 2), src.vocab.size());
            auto s = src.matrix.row(pick);
            std::copy(s.begin(), s.end(), out.matrix.row(i).begin());
        }
    });
    return out;
}

void write_neighborhood_text(std::ostream& out, const SimilarityNeighborhood& nbh,
                             const TokenizerVocab& tgt_vocab,
                             const TokenizerVocab& src_vocab) {
    if (nbh.size() != tgt_vocab.size() || nbh.src_vocab_size != src_vocab.size())
        throw DimensionError("neighborhood export: vocab sizes do not match");

    char buf[64];
    for (std::size_t i = 0; i < nbh.size(); ++i) {
        out << escape_token(tgt_vocab.tokens[i]) << '\t';
        bool first = true;
        for (const auto& nb : nbh.per_token[i]) {
            if (!first) out << ',';
            first = false;
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), nb.score,
                                           std::chars_format::general, 17);
            out << escape_token(src_vocab.tokens[nb.src_id]) << ':';
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
}

NeighborhoodText read_neighborhood_text(std::istream& in) {
    NeighborhoodText nt;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError("neighborhood line " + std::to_string(line_no) +
                             ": missing tab separator");
        nt.tgt_tokens.push_back(unescape_token(line.substr(0, tab)));

        std::vector<std::pair<std::string, double>> entries;
        std::string_view rest = std::string_view(line).substr(tab + 1);
        while (!rest.empty()) {
            auto comma = rest.find(',');
            auto item = comma == std::string_view::npos ? rest : rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{}
                                                   : rest.substr(comma + 1);
            const auto colon = item.rfind(':');
            if (colon == std::string_view::npos)
                throw ParseError("neighborhood line " + std::to_string(line_no) +
                                 ": entry missing ':' separator");
            double score = 0.0;
            auto sv = item.substr(colon + 1);
            auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), score);
            if (ec != std::errc{} || p != sv.data() + sv.size())
                throw ParseError("neighborhood line " + std::to_string(line_no) +
                                 ": bad score '" + std::string(sv) + "'");
            entries.emplace_back(unescape_token(item.substr(0, colon)), score);
        }
        nt.neighbors.push_back(std::move(entries));
    }
    return nt;
}

}  // namespace wechsel
