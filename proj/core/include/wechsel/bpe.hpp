#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wechsel/vectors_io.hpp"

namespace wechsel {

// GPT-2-style reversible byte<->unicode mapping: printable bytes map to
// themselves, the rest to code points 256, 257, ... in ascending byte order.
struct ByteTable {
    std::array<char32_t, 256> to_char{};
    std::unordered_map<char32_t, std::uint8_t> to_byte;
};

ByteTable build_byte_table();

class ByteLevelBpe {
public:
    ByteLevelBpe(TokenizerVocab vocab,
                 std::vector<std::pair<std::string, std::string>> merges);

    const TokenizerVocab& vocab() const { return vocab_; }
    const ByteTable& byte_table() const { return bytes_; }

    // -1 when the adjacent pair is not a merge.
    std::int64_t merge_rank(std::string_view left, std::string_view right) const;
    std::size_t merge_count() const { return n_merges_; }

private:
    TokenizerVocab vocab_;
    ByteTable bytes_;
    std::unordered_map<std::string, std::uint32_t> rank_;  // "left right" -> rank
    std::size_t n_merges_ = 0;
};

// vocab: JSON object token -> dense id. merges: "left right" per line,
// a first line starting with '#' is a header and skipped.
ByteLevelBpe load_tokenizer(std::istream& vocab_in, std::istream& merges_in);

// Byte-map the text, then repeatedly merge the lowest-ranked adjacent pair
// (all occurrences, left to right) until none remains.
std::vector<std::uint32_t> encode(const ByteLevelBpe& tok, std::string_view text,
                                  bool prefix_space);

// Inverse byte mapping of a vocab token; invalid UTF-8 byte runs decode to
// U+FFFD per byte.
std::string token_surface(const ByteLevelBpe& tok, std::string_view token);

}  // namespace wechsel
