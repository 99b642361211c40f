#include "wechsel/procrustes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wechsel/error.hpp"

namespace wechsel {

namespace {

// Work on columns: the matrix is kept column-major here so column ops stream.
struct ColMat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;  // column-major

    ColMat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double* col(std::size_t j) { return data.data() + j * rows; }
    const double* col(std::size_t j) const { return data.data() + j * rows; }
};

void identity(ColMat& m) {
    std::fill(m.data.begin(), m.data.end(), 0.0);
    for (std::size_t j = 0; j < std::min(m.rows, m.cols); ++j) m.col(j)[j] = 1.0;
}

// Fill near-zero singular directions with unit vectors orthogonal to the
// existing columns so U keeps orthonormal columns on rank-deficient input.
void complete_column(ColMat& u, std::size_t j) {
    const std::size_t n = u.rows;
    for (std::size_t cand = 0; cand < n; ++cand) {
        std::vector<double> v(n, 0.0);
        v[cand] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < u.cols; ++k) {
                if (k == j) continue;
                const double* uk = u.col(k);
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += uk[i] * v[i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= dot * uk[i];
            }
        }
        double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        if (norm > 1e-3) {
            double* uj = u.col(j);
            for (std::size_t i = 0; i < n; ++i) uj[i] = v[i] / norm;
            return;
        }
    }
}

}  // namespace

SvdResult svd(const MatD& a, int max_sweeps, double tol) {
    const bool transposed = a.rows() < a.cols();
    const std::size_t n = transposed ? a.cols() : a.rows();  // n >= m
    const std::size_t m = transposed ? a.rows() : a.cols();

    ColMat w(n, m);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (transposed)
                w.col(i)[j] = a.at(i, j);
            else
                w.col(j)[i] = a.at(i, j);
        }

    ColMat v(m, m);
    identity(v);

    int sweeps = 0;
    bool converged = m < 2;
    while (!converged) {
        if (sweeps >= max_sweeps) {
            double worst = 0.0;
            for (std::size_t p = 0; p + 1 < m; ++p)
                for (std::size_t q = p + 1; q < m; ++q) {
                    const double* wp = w.col(p);
                    const double* wq = w.col(q);
                    double alpha = 0.0, beta = 0.0, gamma = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        alpha += wp[i] * wp[i];
                        beta += wq[i] * wq[i];
                        gamma += wp[i] * wq[i];
                    }
                    if (alpha > 0 && beta > 0)
                        worst = std::max(worst, std::abs(gamma) / std::sqrt(alpha * beta));
                }
            throw ConvergenceError("svd: no convergence after " + std::to_string(max_sweeps) +
                                   " sweeps (worst relative off-diagonal " +
                                   std::to_string(worst) + ")");
        }

        converged = true;
        for (std::size_t p = 0; p + 1 < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                double* wp = w.col(p);
                double* wq = w.col(q);
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    alpha += wp[i] * wp[i];
                    beta += wq[i] * wq[i];
                    gamma += wp[i] * wq[i];
                }
                if (gamma == 0.0 || alpha == 0.0 || beta == 0.0) continue;
                if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                converged = false;

                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;

                for (std::size_t i = 0; i < n; ++i) {
                    const double wpi = wp[i], wqi = wq[i];
                    wp[i] = c * wpi - s * wqi;
                    wq[i] = s * wpi + c * wqi;
                }
                double* vp = v.col(p);
                double* vq = v.col(q);
                for (std::size_t i = 0; i < m; ++i) {
                    const double vpi = vp[i], vqi = vq[i];
                    vp[i] = c * vpi - s * vqi;
                    vq[i] = s * vpi + c * vqi;
                }
            }
        }
        ++sweeps;
    }

    std::vector<double> sigma(m);
    ColMat u(n, m);
    for (std::size_t j = 0; j < m; ++j) {
        const double* wj = w.col(j);
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm2 += wj[i] * wj[i];
        sigma[j] = std::sqrt(norm2);
    }

    // descending order, with U/V columns permuted alongside
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    std::vector<double> sigma_sorted(m);
    ColMat v_sorted(m, m);
    for (std::size_t j = 0; j < m; ++j) {
        sigma_sorted[j] = sigma[order[j]];
        std::copy_n(v.col(order[j]), m, v_sorted.col(j));
        std::copy_n(w.col(order[j]), n, u.col(j));
    }

    const double sigma_max = sigma_sorted.empty() ? 0.0 : sigma_sorted[0];
    for (std::size_t j = 0; j < m; ++j) {
        if (sigma_sorted[j] > sigma_max * 1e-14 && sigma_sorted[j] > 0.0) {
            double* uj = u.col(j);
            for (std::size_t i = 0; i < n; ++i) uj[i] /= sigma_sorted[j];
        } else {
            complete_column(u, j);
        }
    }

    SvdResult out;
    out.sweeps = sweeps;
    out.sigma = std::move(sigma_sorted);

    out.u = MatD(transposed ? m : n, m);
    out.v = MatD(transposed ? n : m, m);
    if (!transposed) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < n; ++i) out.u.at(i, j) = u.col(j)[i];
            for (std::size_t i = 0; i < m; ++i) out.v.at(i, j) = v_sorted.col(j)[i];
        }
    } else {
        // A = (A^T)^T = (U' S V'^T)^T = V' S U'^T
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < m; ++i) out.u.at(i, j) = v_sorted.col(j)[i];
            for (std::size_t i = 0; i < n; ++i) out.v.at(i, j) = u.col(j)[i];
        }
    }
    return out;
}

ProcrustesFit fit_procrustes(const MatD& x, const MatD& y) {
    if (x.rows() == 0) throw NoUsablePairsError("fit_procrustes: no paired rows");
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw DimensionError("fit_procrustes: X and Y shapes differ");

    const std::size_t n = x.rows();
    const std::size_t d = x.cols();

    // M = X^T Y, accumulated row by row for cache locality
    MatD cross(d, d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        auto xr = x.row(r);
        auto yr = y.row(r);
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = xr[i];
            if (xi == 0.0) continue;
            double* mi = cross.data() + i * d;
            for (std::size_t j = 0; j < d; ++j) mi[j] += xi * yr[j];
        }
    }

    auto dec = svd(cross);

    ProcrustesFit fit;
    fit.underdetermined = n < d;
    const double smax = dec.sigma.empty() ? 0.0 : dec.sigma[0];
    fit.rank_deficient = smax == 0.0 || dec.sigma.back() <= smax * 1e-12;

    fit.map.rotation = MatD(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += dec.u.at(i, k) * dec.v.at(j, k);
            fit.map.rotation.at(i, j) = acc;
        }
    return fit;
}

DictionaryMatrices build_dictionary_matrices(const WordVectors& src, const WordVectors& tgt,
                                             const BilingualDictionary& dict, bool casefold) {
    auto ascii_lower = [](std::string_view s) {
        std::string out(s);
        for (char& c : out)
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        return out;
    };

    std::unordered_map<std::string, std::uint32_t> src_folded, tgt_folded;
    if (casefold) {
        auto fold_index = [&](const WordVectors& wv) {
            std::unordered_map<std::string, std::uint32_t> idx;
            idx.reserve(wv.size());
            for (std::uint32_t i = 0; i < wv.size(); ++i)
                idx.emplace(ascii_lower(wv.words[i]), i);  // first occurrence wins
            return idx;
        };
        src_folded = fold_index(src);
        tgt_folded = fold_index(tgt);
    }

    auto lookup = [&](const WordVectors& wv,
                      const std::unordered_map<std::string, std::uint32_t>& folded,
                      const std::string& word) -> std::int64_t {
        auto idx = wv.find(word);
        if (idx >= 0 || !casefold) return idx;
        auto it = folded.find(ascii_lower(word));
        return it == folded.end() ? -1 : static_cast<std::int64_t>(it->second);
    };

    const std::size_t d = src.dim();
    if (tgt.dim() != d)
        throw DimensionError("dictionary matrices: source dim " + std::to_string(d) +
                             " != target dim " + std::to_string(tgt.dim()));

    std::vector<std::pair<std::uint32_t, std::uint32_t>> rows;  // (src idx, tgt idx)
    DictionaryMatrices out;
    for (const auto& [sw, tw] : dict.pairs) {
        const auto si = lookup(src, src_folded, sw);
        const auto ti = lookup(tgt, tgt_folded, tw);
        if (si < 0 || ti < 0) {
            ++out.skipped_oov;
            continue;
        }
        auto norm_of = [](std::span<const float> v) {
            double n2 = 0.0;
            for (float f : v) n2 += static_cast<double>(f) * f;
            return std::sqrt(n2);
        };
        if (norm_of(src.vectors.row(static_cast<std::size_t>(si))) == 0.0 ||
            norm_of(tgt.vectors.row(static_cast<std::size_t>(ti))) == 0.0) {
            ++out.skipped_zero_norm;
            continue;
        }
        rows.emplace_back(static_cast<std::uint32_t>(si), static_cast<std::uint32_t>(ti));
    }

    if (rows.empty())
        throw NoUsablePairsError("no dictionary pair is covered by both vocabularies");

    out.used = rows.size();
    out.x = MatD(rows.size(), d);
    out.y = MatD(rows.size(), d);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto copy_unit = [&](std::span<const float> in, std::span<double> dst) {
            double n2 = 0.0;
            for (std::size_t j = 0; j < in.size(); ++j) n2 += static_cast<double>(in[j]) * in[j];
            const double inv = 1.0 / std::sqrt(n2);
            for (std::size_t j = 0; j < in.size(); ++j) dst[j] = in[j] * inv;
        };
        copy_unit(tgt.vectors.row(rows[r].second), out.x.row(r));
        copy_unit(src.vectors.row(rows[r].first), out.y.row(r));
    }
    return out;
}

WordVectors apply_map(const WordVectors& vectors, const OrthogonalMap& map) {
    WordVectors out = vectors;
    apply_map_rows(out.vectors, map);
    return out;
}

void apply_map_rows(MatF& rows, const OrthogonalMap& map) {
    const std::size_t d = map.rotation.rows();
    if (rows.cols() != d)
        throw DimensionError("apply_map: vector dim " + std::to_string(rows.cols()) +
                             " != rotation dim " + std::to_string(d));

    std::vector<double> tmp(d);
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        auto row = rows.row(r);
        std::fill(tmp.begin(), tmp.end(), 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = row[i];
            if (xi == 0.0) continue;
            const double* ri = map.rotation.data() + i * d;
            for (std::size_t j = 0; j < d; ++j) tmp[j] += xi * ri[j];
        }
        for (std::size_t j = 0; j < d; ++j) row[j] = static_cast<float>(tmp[j]);
    }
}

}  // namespace wechsel
