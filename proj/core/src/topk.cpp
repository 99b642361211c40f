#include "wechsel/topk.hpp"

#include <algorithm>
#include <cmath>

#include "wechsel/error.hpp"
#include "wechsel/parallel.hpp"

namespace wechsel {

namespace {

constexpr std::size_t kQueryBlock = 64;
constexpr std::size_t kCandBlock = 128;

// (score desc, id asc): `a` orders strictly after `b`
bool worse(const ScoredId& a, const ScoredId& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.id > b.id;
}

// Normalize kept rows into a compact double matrix; returns original ids.
std::vector<std::uint32_t> compact_normalized(const MatF& rows,
                                              const std::vector<std::uint8_t>* skip,
                                              MatD& out) {
    std::vector<std::uint32_t> ids;
    ids.reserve(rows.rows());
    std::vector<double> norms;
    norms.reserve(rows.rows());

    for (std::size_t i = 0; i < rows.rows(); ++i) {
        if (skip && (*skip)[i]) continue;
        auto r = rows.row(i);
        double n2 = 0.0;
        for (float f : r) n2 += static_cast<double>(f) * f;
        if (n2 == 0.0) continue;  // no direction, cannot participate in cosine
        ids.push_back(static_cast<std::uint32_t>(i));
        norms.push_back(std::sqrt(n2));
    }

    out = MatD(ids.size(), rows.cols());
    for (std::size_t c = 0; c < ids.size(); ++c) {
        auto src = rows.row(ids[c]);
        auto dst = out.row(c);
        const double inv = 1.0 / norms[c];
        for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j] * inv;
    }
    return ids;
}

// Bounded selector: min-heap over (score, id) with the worst entry at the
// root. Candidates arrive in ascending id order.
class TopKHeap {
public:
    explicit TopKHeap(std::size_t k) : k_(k) { heap_.reserve(k); }

    void offer(std::uint32_t id, double score) {
        if (heap_.size() < k_) {
            heap_.push_back({id, score});
            std::push_heap(heap_.begin(), heap_.end(), worse_heap);
            return;
        }
        if (worse({id, score}, heap_.front())) return;
        std::pop_heap(heap_.begin(), heap_.end(), worse_heap);
        heap_.back() = {id, score};
        std::push_heap(heap_.begin(), heap_.end(), worse_heap);
    }

    std::vector<ScoredId> sorted_desc() && {
        std::sort(heap_.begin(), heap_.end(),
                  [](const ScoredId& a, const ScoredId& b) { return worse(b, a); });
        return std::move(heap_);
    }

private:
    // std::push_heap keeps the max on top; invert so the worst sits there
    static bool worse_heap(const ScoredId& a, const ScoredId& b) { return worse(b, a); }

    std::size_t k_;
    std::vector<ScoredId> heap_;
};

}  // namespace

std::vector<std::vector<ScoredId>> topk_cosine(const MatF& queries,
                                               const std::vector<std::uint8_t>* query_skip,
                                               const MatF& candidates,
                                               const std::vector<std::uint8_t>* candidate_skip,
                                               int k, int threads) {
    if (k < 1) throw ParseError("top-k search requires k >= 1");
    if (queries.cols() != candidates.cols())
        throw DimensionError("top-k search: query dim " + std::to_string(queries.cols()) +
                             " != candidate dim " + std::to_string(candidates.cols()));
    if (query_skip && query_skip->size() != queries.rows())
        throw DimensionError("top-k search: query skip size mismatch");
    if (candidate_skip && candidate_skip->size() != candidates.rows())
        throw DimensionError("top-k search: candidate skip size mismatch");

    const std::size_t d = queries.cols();

    MatD qmat, cmat;
    const auto qids = compact_normalized(queries, query_skip, qmat);
    const auto cids = compact_normalized(candidates, candidate_skip, cmat);
    if (cids.empty())
        throw NoUsablePairsError("top-k search: every candidate row is flagged or zero");

    const std::size_t kept = std::min<std::size_t>(static_cast<std::size_t>(k), cids.size());
    std::vector<std::vector<ScoredId>> results(queries.rows());

    const std::size_t n_qblocks = (qmat.rows() + kQueryBlock - 1) / kQueryBlock;
    parallel_chunks(0, n_qblocks, threads, [&](std::size_t blo, std::size_t bhi) {
        // per-worker scratch
        std::vector<double> ct(kCandBlock * d);          // candidate block, transposed d x cb
        std::vector<double> scores(kQueryBlock * kCandBlock);

        for (std::size_t qb = blo; qb < bhi; ++qb) {
            const std::size_t q0 = qb * kQueryBlock;
            const std::size_t q1 = std::min(qmat.rows(), q0 + kQueryBlock);
            const std::size_t qn = q1 - q0;

            std::vector<TopKHeap> heaps;
            heaps.reserve(qn);
            for (std::size_t i = 0; i < qn; ++i) heaps.emplace_back(kept);

            for (std::size_t c0 = 0; c0 < cmat.rows(); c0 += kCandBlock) {
                const std::size_t c1 = std::min(cmat.rows(), c0 + kCandBlock);
                const std::size_t cn = c1 - c0;

                for (std::size_t c = 0; c < cn; ++c) {
                    const double* src = cmat.row(c0 + c).data();
                    for (std::size_t p = 0; p < d; ++p) ct[p * cn + c] = src[p];
                }

                std::fill(scores.begin(), scores.begin() + qn * cn, 0.0);
                for (std::size_t qi = 0; qi < qn; ++qi) {
                    const double* q = qmat.row(q0 + qi).data();
                    double* srow = scores.data() + qi * cn;
                    for (std::size_t p = 0; p < d; ++p) {
                        const double a = q[p];
                        const double* cp = ct.data() + p * cn;
                        for (std::size_t c = 0; c < cn; ++c) srow[c] += a * cp[c];
                    }
                }

                for (std::size_t qi = 0; qi < qn; ++qi) {
                    const double* srow = scores.data() + qi * cn;
                    for (std::size_t c = 0; c < cn; ++c)
                        heaps[qi].offer(static_cast<std::uint32_t>(c0 + c), srow[c]);
                }
            }

            for (std::size_t qi = 0; qi < qn; ++qi) {
                auto picked = std::move(heaps[qi]).sorted_desc();
                for (auto& e : picked) e.id = cids[e.id];  // compact -> original ids
                results[qids[q0 + qi]] = std::move(picked);
            }
        }
    });

    return results;
}

}  // namespace wechsel
