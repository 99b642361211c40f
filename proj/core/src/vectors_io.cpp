#include "wechsel/vectors_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "wechsel/error.hpp"

namespace wechsel {

namespace {

// strip a trailing '\r' so CRLF files parse the same as LF files
void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

float parse_float(std::string_view field, std::size_t line_no) {
    float v = 0.0f;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad float value '" +
                         std::string(field) + "'");
    if (!std::isfinite(v))
        throw ParseError("line " + std::to_string(line_no) + ": non-finite value '" +
                         std::string(field) + "'");
    return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

std::int64_t WordVectors::find(std::string_view word) const {
    auto it = index.find(std::string(word));
    return it == index.end() ? -1 : static_cast<std::int64_t>(it->second);
}

void WordVectors::rebuild_index() {
    index.clear();
    index.reserve(words.size());
    for (std::uint32_t i = 0; i < words.size(); ++i) index.emplace(words[i], i);
}

std::int64_t TokenizerVocab::find(std::string_view token) const {
    auto it = id_of.find(std::string(token));
    return it == id_of.end() ? -1 : static_cast<std::int64_t>(it->second);
}

TokenizerVocab TokenizerVocab::from_tokens(std::vector<std::string> tokens) {
    TokenizerVocab v;
    v.id_of.reserve(tokens.size());
    for (std::uint32_t i = 0; i < tokens.size(); ++i) {
        auto [_, inserted] = v.id_of.emplace(tokens[i], i);
        if (!inserted) throw ParseError("duplicate token '" + tokens[i] + "'");
    }
    v.tokens = std::move(tokens);
    return v;
}

WordVectors load_word_vectors(std::istream& in, std::optional<std::size_t> limit) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty word-vector stream");
    chomp(line);

    auto header = split_ws(line);
    if (header.size() != 2)
        throw ParseError("word-vector header must be 'count dim', got '" + line + "'");
    std::size_t declared = 0, dim = 0;
    auto rc1 = std::from_chars(header[0].data(), header[0].data() + header[0].size(), declared);
    auto rc2 = std::from_chars(header[1].data(), header[1].data() + header[1].size(), dim);
    if (rc1.ec != std::errc{} || rc2.ec != std::errc{} || dim == 0)
        throw ParseError("word-vector header must be 'count dim', got '" + line + "'");

    const std::size_t want = limit ? std::min(*limit, declared) : declared;

    WordVectors wv;
    wv.words.reserve(want);
    wv.vectors = MatF(want, dim);
    wv.index.reserve(want);

    std::size_t row = 0;
    std::size_t line_no = 1;
    while (row < want && std::getline(in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) continue;

        auto fields = split_ws(line);
        if (fields.size() != dim + 1)
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(dim) + " values for word '" +
                             (fields.empty() ? std::string() : std::string(fields[0])) +
                             "', got " + std::to_string(fields.size() - 1));

        std::string word(fields[0]);
        auto [_, inserted] = wv.index.emplace(word, static_cast<std::uint32_t>(row));
        if (!inserted)
            throw ParseError("line " + std::to_string(line_no) + ": duplicate word '" +
                             word + "'");
        wv.words.push_back(std::move(word));

        auto dst = wv.vectors.row(row);
        for (std::size_t j = 0; j < dim; ++j) dst[j] = parse_float(fields[j + 1], line_no);
        ++row;
    }

    if (row < want)
        throw ParseError("word-vector stream ended after " + std::to_string(row) +
                         " of " + std::to_string(want) + " declared entries");
    return wv;
}

void save_word_vectors(std::ostream& out, const WordVectors& wv) {
    out << wv.size() << ' ' << wv.dim() << '\n';
    char buf[64];
    for (std::size_t i = 0; i < wv.size(); ++i) {
        out << wv.words[i];
        for (float v : wv.vectors.row(i)) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                           std::chars_format::general,
                                           std::numeric_limits<float>::max_digits10);
            out << ' ';
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
}

void attach_frequencies(WordVectors& wv, std::istream& in) {
    std::vector<std::uint64_t> counts(wv.size(), 0);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) continue;
        auto fields = split_ws(line);
        if (fields.size() != 2)
            throw ParseError("frequency file line " + std::to_string(line_no) +
                             ": expected 'word count'");
        std::uint64_t c = 0;
        auto rc = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), c);
        if (rc.ec != std::errc{} || rc.ptr != fields[1].data() + fields[1].size())
            throw ParseError("frequency file line " + std::to_string(line_no) +
                             ": bad count '" + std::string(fields[1]) + "'");
        auto idx = wv.find(fields[0]);
        if (idx >= 0) counts[static_cast<std::size_t>(idx)] = c;
    }
    wv.counts = std::move(counts);
}

void attach_uniform_frequencies(WordVectors& wv) {
    wv.counts = std::vector<std::uint64_t>(wv.size(), 1);
}

BilingualDictionary load_dictionary(std::istream& in) {
    BilingualDictionary dict;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) continue;
        auto fields = split_ws(line);
        if (fields.size() != 2)
            throw ParseError("dictionary line " + std::to_string(line_no) +
                             ": expected exactly two fields, got " +
                             std::to_string(fields.size()));
        dict.pairs.emplace_back(std::string(fields[0]), std::string(fields[1]));
    }
    return dict;
}

std::string escape_token(std::string_view token) {
    std::string out;
    out.reserve(token.size());
    for (char c : token) {
        if (c == '\\')
            out += "\\\\";
        else if (c == '\n')
            out += "\\n";
        else
            out.push_back(c);
    }
    return out;
}

std::string unescape_token(std::string_view line) {
    std::string out;
    out.reserve(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] != '\\') {
            out.push_back(line[i]);
            continue;
        }
        if (i + 1 >= line.size())
            throw ParseError("dangling escape in token line");
        ++i;
        if (line[i] == '\\')
            out.push_back('\\');
        else if (line[i] == 'n')
            out.push_back('\n');
        else if (line[i] == 's')
            out.push_back(' ');
        else
            throw ParseError(std::string("unknown token escape '\\") + line[i] + "'");
    }
    return out;
}

namespace {

void write_f32_le(std::ostream& out, const float* data, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * 4));
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto bits = std::bit_cast<std::uint32_t>(data[i]);
        char b[4] = {static_cast<char>(bits), static_cast<char>(bits >> 8),
                     static_cast<char>(bits >> 16), static_cast<char>(bits >> 24)};
        out.write(b, 4);
    }
}

void read_f32_le(std::istream& in, float* data, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * 4));
        if (static_cast<std::size_t>(in.gcount()) != n * 4)
            throw ParseError("matrix payload truncated");
        return;
    }
    std::vector<char> buf(n * 4);
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size())
        throw ParseError("matrix payload truncated");
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits = static_cast<std::uint8_t>(buf[4 * i]) |
                             (static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[4 * i + 1])) << 8) |
                             (static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[4 * i + 2])) << 16) |
                             (static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[4 * i + 3])) << 24);
        data[i] = std::bit_cast<float>(bits);
    }
}

}  // namespace

void write_matrix(std::ostream& out, const TokenEmbeddingMatrix& m,
                  std::string_view kind, const std::vector<std::uint8_t>* zero_flags) {
    const bool subword = kind == "subword-static";
    if (subword != (zero_flags != nullptr))
        throw ParseError("zero flags are required exactly when kind is 'subword-static'");
    if (zero_flags && zero_flags->size() != m.vocab.size())
        throw DimensionError("zero-flag bitmap size does not match vocab");

    // header emitted by hand so the byte layout is canonical
    out << "{\"vocab_size\":" << m.vocab.size() << ",\"dim\":" << m.dim()
        << ",\"dtype\":\"f32\",\"order\":\"row-major\"";
    if (!kind.empty()) out << ",\"kind\":\"" << kind << "\"";
    out << "}\n";

    for (const auto& tok : m.vocab.tokens) out << escape_token(tok) << '\n';

    if (zero_flags) {
        for (auto f : *zero_flags) out.put(f ? '1' : '0');
        out.put('\n');
    }

    write_f32_le(out, m.matrix.data(), m.matrix.size());
}

MatrixFile read_matrix(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ParseError("missing matrix header line");

    nlohmann::json j = nlohmann::json::parse(header, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ParseError("matrix header is not valid JSON: '" + header + "'");
    if (!j.contains("vocab_size") || !j.contains("dim"))
        throw ParseError("matrix header missing vocab_size/dim");
    if (j.value("dtype", "") != "f32" || j.value("order", "") != "row-major")
        throw ParseError("matrix header must declare dtype f32 and row-major order");

    const auto vocab_size = j["vocab_size"].get<std::size_t>();
    const auto dim = j["dim"].get<std::size_t>();

    MatrixFile mf;
    mf.kind = j.value("kind", "");

    std::vector<std::string> tokens;
    tokens.reserve(vocab_size);
    std::string line;
    for (std::size_t i = 0; i < vocab_size; ++i) {
        if (!std::getline(in, line))
            throw ParseError("matrix token list truncated at entry " + std::to_string(i));
        tokens.push_back(unescape_token(line));
    }
    mf.embedding.vocab = TokenizerVocab::from_tokens(std::move(tokens));

    if (mf.kind == "subword-static") {
        if (!std::getline(in, line) || line.size() != vocab_size)
            throw ParseError("subword-static matrix missing zero-flag bitmap line");
        std::vector<std::uint8_t> flags(vocab_size);
        for (std::size_t i = 0; i < vocab_size; ++i) {
            if (line[i] != '0' && line[i] != '1')
                throw ParseError("zero-flag bitmap contains non-binary character");
            flags[i] = line[i] == '1';
        }
        mf.zero_flags = std::move(flags);
    }

    mf.embedding.matrix = MatF(vocab_size, dim);
    read_f32_le(in, mf.embedding.matrix.data(), mf.embedding.matrix.size());
    if (in.peek() != std::char_traits<char>::eof())
        throw ParseError("matrix payload has trailing bytes");

    for (std::size_t i = 0; i < mf.embedding.matrix.size(); ++i)
        if (!std::isfinite(mf.embedding.matrix.data()[i]))
            throw ParseError("matrix payload contains a non-finite value");

    return mf;
}

void write_matrix_text(std::ostream& out, const TokenEmbeddingMatrix& m) {
    out << m.vocab.size() << ' ' << m.dim() << '\n';
    char buf[64];
    for (std::size_t i = 0; i < m.vocab.size(); ++i) {
        // additionally escape spaces; the format splits fields on whitespace
        std::string tok = escape_token(m.vocab.tokens[i]);
        std::string safe;
        safe.reserve(tok.size());
        for (char c : tok) {
            if (c == ' ')
                safe += "\\s";
            else
                safe.push_back(c);
        }
        out << safe;
        for (float v : m.matrix.row(i)) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                           std::chars_format::general,
                                           std::numeric_limits<float>::max_digits10);
            out << ' ';
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
}

TokenizerVocab load_vocab_json(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ParseError("vocab file is not a JSON object");

    std::vector<std::string> tokens(j.size());
    std::vector<bool> seen(j.size(), false);
    for (auto& [token, id] : j.items()) {
        if (!id.is_number_unsigned() && !id.is_number_integer())
            throw ParseError("vocab id for '" + token + "' is not an integer");
        auto v = id.get<std::int64_t>();
        if (v < 0 || static_cast<std::size_t>(v) >= j.size())
            throw ParseError("vocab ids are not dense 0..n-1 (id " + std::to_string(v) +
                             " out of range for size " + std::to_string(j.size()) + ")");
        if (seen[static_cast<std::size_t>(v)])
            throw ParseError("vocab ids are not dense 0..n-1 (id " + std::to_string(v) +
                             " repeated)");
        seen[static_cast<std::size_t>(v)] = true;
        tokens[static_cast<std::size_t>(v)] = token;
    }
    return TokenizerVocab::from_tokens(std::move(tokens));
}

}  // namespace wechsel
