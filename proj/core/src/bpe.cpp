#include "wechsel/bpe.hpp"

#include <istream>
#include <limits>

#include "wechsel/error.hpp"
#include "wechsel/utf8.hpp"

namespace wechsel {

ByteTable build_byte_table() {
    ByteTable t;
    auto printable = [](int b) {
        return (b >= 0x21 && b <= 0x7E) || (b >= 0xA1 && b <= 0xAC) || (b >= 0xAE && b <= 0xFF);
    };
    char32_t next = 256;
    for (int b = 0; b < 256; ++b) {
        const char32_t cp = printable(b) ? static_cast<char32_t>(b) : next++;
        t.to_char[static_cast<std::size_t>(b)] = cp;
        t.to_byte.emplace(cp, static_cast<std::uint8_t>(b));
    }
    return t;
}

ByteLevelBpe::ByteLevelBpe(TokenizerVocab vocab,
                           std::vector<std::pair<std::string, std::string>> merges)
    : vocab_(std::move(vocab)), bytes_(build_byte_table()), n_merges_(merges.size()) {
    rank_.reserve(merges.size());
    for (std::uint32_t r = 0; r < merges.size(); ++r) {
        const auto& [left, right] = merges[r];
        if (vocab_.find(left) < 0 || vocab_.find(right) < 0 || vocab_.find(left + right) < 0)
            throw ParseError("merge '" + left + " " + right +
                             "' is not constructible from vocab symbols");
        auto [_, inserted] = rank_.emplace(left + " " + right, r);
        if (!inserted) throw ParseError("duplicate merge '" + left + " " + right + "'");
    }
}

std::int64_t ByteLevelBpe::merge_rank(std::string_view left, std::string_view right) const {
    thread_local std::string key;
    key.clear();
    key.reserve(left.size() + right.size() + 1);
    key.append(left);
    key.push_back(' ');
    key.append(right);
    auto it = rank_.find(key);
    return it == rank_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

ByteLevelBpe load_tokenizer(std::istream& vocab_in, std::istream& merges_in) {
    TokenizerVocab vocab = load_vocab_json(vocab_in);

    std::vector<std::pair<std::string, std::string>> merges;
    std::string line;
    bool first = true;
    while (std::getline(merges_in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first && !line.empty() && line[0] == '#') {
            first = false;
            continue;
        }
        first = false;
        if (line.empty()) continue;

        const auto sp = line.find(' ');
        if (sp == std::string::npos || sp == 0 || sp + 1 >= line.size() ||
            line.find(' ', sp + 1) != std::string::npos)
            throw ParseError("merges line '" + line + "': expected 'left right'");
        merges.emplace_back(line.substr(0, sp), line.substr(sp + 1));
    }
    return ByteLevelBpe(std::move(vocab), std::move(merges));
}

std::vector<std::uint32_t> encode(const ByteLevelBpe& tok, std::string_view text,
                                  bool prefix_space) {
    const auto& table = tok.byte_table();

    std::vector<std::string> symbols;
    symbols.reserve(text.size() + 1);
    if (prefix_space) symbols.push_back(utf8::encode(table.to_char[0x20]));
    for (unsigned char b : text) symbols.push_back(utf8::encode(table.to_char[b]));

    while (symbols.size() > 1) {
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
            const auto r = tok.merge_rank(symbols[i], symbols[i + 1]);
            if (r >= 0 && r < best) best = r;
        }
        if (best == std::numeric_limits<std::int64_t>::max()) break;

        // merge every occurrence of the chosen pair, left to right
        std::vector<std::string> merged;
        merged.reserve(symbols.size());
        for (std::size_t i = 0; i < symbols.size();) {
            if (i + 1 < symbols.size() &&
                tok.merge_rank(symbols[i], symbols[i + 1]) == best) {
                merged.push_back(symbols[i] + symbols[i + 1]);
                i += 2;
            } else {
                merged.push_back(std::move(symbols[i]));
                i += 1;
            }
        }
        symbols = std::move(merged);
    }

    std::vector<std::uint32_t> ids;
    ids.reserve(symbols.size());
    for (const auto& s : symbols) {
        const auto id = tok.vocab().find(s);
        if (id < 0)
            throw TokenizerError("symbol '" + s +
                                 "' is not in the vocab; vocab and merges are inconsistent");
        ids.push_back(static_cast<std::uint32_t>(id));
    }
    return ids;
}

std::string token_surface(const ByteLevelBpe& tok, std::string_view token) {
    const auto& table = tok.byte_table();

    std::string raw;
    raw.reserve(token.size());
    std::size_t pos = 0;
    while (pos < token.size()) {
        const auto d = utf8::decode_next(token, pos);
        if (!d.valid)
            throw TokenizerError("token contains invalid UTF-8 and cannot be byte-unmapped");
        auto it = table.to_byte.find(d.cp);
        if (it == table.to_byte.end())
            throw TokenizerError("token symbol U+" + std::to_string(d.cp) +
                                 " is outside the byte table image");
        raw.push_back(static_cast<char>(it->second));
        pos += d.len;
    }
    return utf8::sanitize(raw);
}

}  // namespace wechsel
