#include "wechsel/fasttext.hpp"

#include <bit>
#include <istream>
#include <limits>

#include "wechsel/error.hpp"
#include "wechsel/utf8.hpp"

namespace wechsel {

namespace {

constexpr std::int32_t kMagic = 793712314;
constexpr std::int32_t kMaxVersion = 12;

// Little-endian field reader over a stream; throws on truncation.
class BinReader {
public:
    explicit BinReader(std::istream& in) : in_(in) {}

    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    std::int8_t i8() {
        char c;
        get(&c, 1);
        return static_cast<std::int8_t>(c);
    }
    double f64() { return std::bit_cast<double>(u64()); }

    std::string cstring(std::size_t max_len = 4096) {
        std::string s;
        char c;
        while (true) {
            get(&c, 1);
            if (c == '\0') return s;
            s.push_back(c);
            if (s.size() > max_len) throw ParseError("fasttext model: unterminated string");
        }
    }

    void floats(float* dst, std::size_t n) {
        if constexpr (std::endian::native == std::endian::little) {
            get(reinterpret_cast<char*>(dst), n * 4);
            return;
        }
        for (std::size_t i = 0; i < n; ++i) {
            char b[4];
            get(b, 4);
            std::uint32_t bits = static_cast<std::uint8_t>(b[0]) |
                                 (static_cast<std::uint32_t>(static_cast<std::uint8_t>(b[1])) << 8) |
                                 (static_cast<std::uint32_t>(static_cast<std::uint8_t>(b[2])) << 16) |
                                 (static_cast<std::uint32_t>(static_cast<std::uint8_t>(b[3])) << 24);
            dst[i] = std::bit_cast<float>(bits);
        }
    }

private:
    std::uint32_t u32() {
        char b[4];
        get(b, 4);
        return static_cast<std::uint8_t>(b[0]) |
               (static_cast<std::uint32_t>(static_cast<std::uint8_t>(b[1])) << 8) |
               (static_cast<std::uint32_t>(static_cast<std::uint8_t>(b[2])) << 16) |
               (static_cast<std::uint32_t>(static_cast<std::uint8_t>(b[3])) << 24);
    }
    std::uint64_t u64() {
        char b[8];
        get(b, 8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(b[i]);
        return v;
    }
    void get(char* dst, std::size_t n) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw ParseError("fasttext model: truncated stream");
    }

    std::istream& in_;
};

}  // namespace

FastTextModel parse_fasttext_model(std::istream& in) {
    BinReader r(in);

    const auto magic = r.i32();
    if (magic != kMagic)
        throw ParseError("fasttext model: wrong magic " + std::to_string(magic) +
                         " (expected " + std::to_string(kMagic) + ")");
    const auto version = r.i32();
    if (version > kMaxVersion)
        throw ParseError("fasttext model: unsupported version " + std::to_string(version));

    FastTextModel m;
    m.dim = r.i32();
    r.i32();  // ws
    r.i32();  // epoch
    r.i32();  // minCount
    r.i32();  // neg
    r.i32();  // wordNgrams
    r.i32();  // loss
    r.i32();  // model
    m.bucket = r.i32();
    m.minn = r.i32();
    m.maxn = r.i32();
    r.i32();  // lrUpdateRate
    r.f64();  // t

    if (m.dim <= 0 || m.dim > 65536)
        throw ParseError("fasttext model: implausible dim " + std::to_string(m.dim));
    if (m.bucket <= 0)
        throw ParseError("fasttext model: bucket must be positive, got " +
                         std::to_string(m.bucket));
    if (m.minn <= 0 || m.maxn < m.minn)
        throw ParseError("fasttext model: bad n-gram bounds minn=" + std::to_string(m.minn) +
                         " maxn=" + std::to_string(m.maxn));

    const auto size = r.i32();
    const auto nwords = r.i32();
    const auto nlabels = r.i32();
    r.i64();  // ntokens
    const auto pruneidx_size = r.i64();
    if (size < 0 || nwords < 0 || nlabels < 0 || nwords + nlabels > size)
        throw ParseError("fasttext model: inconsistent dictionary sizes");
    if (pruneidx_size > 0)
        throw ParseError("fasttext model: pruned dictionaries are unsupported");

    m.words.reserve(static_cast<std::size_t>(nwords));
    for (std::int32_t i = 0; i < size; ++i) {
        FastTextWord w;
        w.word = r.cstring();
        w.count = r.i64();
        const auto type = r.i8();
        if (type == 0 && static_cast<std::int32_t>(m.words.size()) < nwords)
            m.words.push_back(std::move(w));
    }
    if (static_cast<std::int32_t>(m.words.size()) != nwords)
        throw ParseError("fasttext model: dictionary lists fewer words than declared");

    if (r.i8() != 0)
        throw ParseError("fasttext model: quantized models are unsupported");

    const auto rows = r.i64();
    const auto cols = r.i64();
    if (rows != static_cast<std::int64_t>(nwords) + m.bucket)
        throw ParseError("fasttext model: input matrix rows " + std::to_string(rows) +
                         " != nwords + bucket = " +
                         std::to_string(static_cast<std::int64_t>(nwords) + m.bucket));
    if (cols != m.dim)
        throw ParseError("fasttext model: input matrix cols " + std::to_string(cols) +
                         " != dim " + std::to_string(m.dim));

    m.input = MatF(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    r.floats(m.input.data(), m.input.size());

    // anything after the input matrix (qout flag, output matrix) is ignored
    return m;
}

std::uint32_t fnv1a_hash(std::string_view bytes) {
    std::uint32_t h = 2166136261u;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 16777619u;
    }
    return h;
}

std::vector<std::string> extract_ngrams(std::string_view word, int minn, int maxn) {
    std::string wrapped;
    wrapped.reserve(word.size() + 2);
    wrapped.push_back('<');
    wrapped.append(word);
    wrapped.push_back('>');

    const auto offs = utf8::scalar_offsets(wrapped);
    const auto n = offs.size() - 1;  // scalar count

    std::vector<std::string> grams;
    for (std::size_t start = 0; start < n; ++start) {
        for (int len = minn; len <= maxn; ++len) {
            const auto end = start + static_cast<std::size_t>(len);
            if (end > n) break;
            grams.emplace_back(wrapped.substr(offs[start], offs[end] - offs[start]));
        }
    }
    return grams;
}

std::span<const float> ngram_vector(const FastTextModel& model, std::string_view gram) {
    const auto bucket = fnv1a_hash(gram) % static_cast<std::uint32_t>(model.bucket);
    return model.input.row(model.nwords() + bucket);
}

}  // namespace wechsel
