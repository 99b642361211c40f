#include "wechsel/subword.hpp"

#include <algorithm>
#include <string>

#include "wechsel/error.hpp"
#include "wechsel/parallel.hpp"

namespace wechsel {

TokenEmbeddingResult token_embedding_ngram(const FastTextModel& model,
                                           std::string_view surface, int minn, int maxn) {
    TokenEmbeddingResult out;
    out.vector.assign(static_cast<std::size_t>(model.dim), 0.0f);
    if (surface.empty()) {
        out.is_zero = true;
        return out;
    }

    const auto grams = extract_ngrams(surface, minn, maxn);
    if (grams.empty()) {
        out.is_zero = true;
        return out;
    }

    std::vector<double> acc(static_cast<std::size_t>(model.dim), 0.0);
    for (const auto& g : grams) {
        auto row = ngram_vector(model, g);
        for (std::size_t j = 0; j < row.size(); ++j) acc[j] += row[j];
    }
    for (std::size_t j = 0; j < acc.size(); ++j) out.vector[j] = static_cast<float>(acc[j]);
    return out;
}

SubwordStaticEmbeddings compute_subword_embeddings_ngram(const ByteLevelBpe& tok,
                                                         const FastTextModel& model,
                                                         int threads) {
    const auto& vocab = tok.vocab();
    SubwordStaticEmbeddings out;
    out.vocab = vocab;
    out.matrix = MatF(vocab.size(), static_cast<std::size_t>(model.dim));
    out.zero_flag.assign(vocab.size(), 0);

    parallel_chunks(0, vocab.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            std::string surface;
            try {
                surface = token_surface(tok, vocab.tokens[i]);
            } catch (const TokenizerError& e) {
                throw TokenizerError("token id " + std::to_string(i) + " ('" +
                                     vocab.tokens[i] + "'): " + e.what());
            }
            if (!surface.empty() && surface.front() == ' ') surface.erase(0, 1);

            auto r = token_embedding_ngram(model, surface, model.minn, model.maxn);
            std::copy(r.vector.begin(), r.vector.end(), out.matrix.row(i).begin());
            out.zero_flag[i] = r.is_zero ? 1 : 0;
        }
    });
    return out;
}

TokenOccurrenceIndex build_occurrence_index(const WordVectors& words, const ByteLevelBpe& tok,
                                            bool prefix_space, int threads) {
    if (!words.counts)
        throw ParseError("occurrence index requires word frequencies "
                         "(attach a frequency file or use uniform frequencies)");

    const auto& counts = *words.counts;
    const std::size_t vocab_size = tok.vocab().size();

    // Tokenize in parallel, then merge per-word results in word order so the
    // index is identical at any thread count.
    std::vector<std::vector<std::uint32_t>> word_tokens(words.size());
    std::vector<std::uint8_t> failed(words.size(), 0);
    parallel_chunks(0, words.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t w = lo; w < hi; ++w) {
            try {
                auto ids = encode(tok, words.words[w], prefix_space);
                std::sort(ids.begin(), ids.end());
                ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
                word_tokens[w] = std::move(ids);
            } catch (const TokenizerError&) {
                failed[w] = 1;  // word not encodable with this vocab; skip it
            }
        }
    });

    TokenOccurrenceIndex index;
    index.by_token.resize(vocab_size);
    for (std::size_t w = 0; w < words.size(); ++w) {
        if (failed[w]) {
            ++index.words_skipped;
            continue;
        }
        for (auto id : word_tokens[w])
            index.by_token[id].emplace_back(static_cast<std::uint32_t>(w), counts[w]);
    }
    return index;
}

SubwordStaticEmbeddings compute_subword_embeddings_tfr(const TokenOccurrenceIndex& index,
                                                       const WordVectors& words,
                                                       const TokenizerVocab& vocab,
                                                       int threads) {
    if (index.vocab_size() != vocab.size())
        throw DimensionError("occurrence index size " + std::to_string(index.vocab_size()) +
                             " != vocab size " + std::to_string(vocab.size()));

    const std::size_t d = words.dim();
    SubwordStaticEmbeddings out;
    out.vocab = vocab;
    out.matrix = MatF(vocab.size(), d);
    out.zero_flag.assign(vocab.size(), 0);

    parallel_chunks(0, vocab.size(), threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> acc(d);
        for (std::size_t t = lo; t < hi; ++t) {
            std::fill(acc.begin(), acc.end(), 0.0);
            double total = 0.0;
            for (const auto& [w, f] : index.by_token[t]) {
                if (f == 0) continue;
                auto row = words.vectors.row(w);
                const auto fd = static_cast<double>(f);
                for (std::size_t j = 0; j < d; ++j) acc[j] += fd * row[j];
                total += fd;
            }
            if (total == 0.0) {
                out.zero_flag[t] = 1;
                continue;
            }
            auto dst = out.matrix.row(t);
            for (std::size_t j = 0; j < d; ++j) dst[j] = static_cast<float>(acc[j] / total);
        }
    });
    return out;
}

}  // namespace wechsel
