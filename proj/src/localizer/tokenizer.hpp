#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace taskgrid::localizer {

// Fixed vocabulary: <unk>, every catalog word and the instruction template
// words. Ids are stable across builds for a given catalog.
class Vocabulary {
public:
    static const Vocabulary& standard();

    std::size_t size() const { return words_.size(); }
    std::int64_t id(const std::string& word) const;   // 0 for unknown words
    const std::string& word(std::size_t id) const { return words_.at(id); }

    // Lower-cases, drops punctuation and splits on whitespace.
    static std::vector<std::string> tokenize(const std::string& text);
    std::vector<std::int64_t> encode(const std::string& text) const;

private:
    std::vector<std::string> words_;
};

inline constexpr std::int64_t kUnknownToken = 0;

} // namespace taskgrid::localizer
