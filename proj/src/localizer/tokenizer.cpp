#include "localizer/tokenizer.hpp"

#include "world/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace taskgrid::localizer {

const Vocabulary& Vocabulary::standard() {
    static const Vocabulary v = [] {
        Vocabulary out;
        std::vector<std::string> words{
            "pick", "up", "put", "it", "in", "on", "the", "a", "another", "turn", "off", "open", "close",
            "go", "to", "slice", "rinse", "heat", "chill", "with", "two", "items", "clean", "hot", "cold",
            "examine", "under"};
        for (std::size_t i = 0; i < world::kCategoryCount; ++i) {
            for (const auto& w : tokenize(world::category_words(world::category_at(i)))) words.push_back(w);
        }
        std::sort(words.begin(), words.end());
        words.erase(std::unique(words.begin(), words.end()), words.end());
        out.words_.push_back("<unk>");
        out.words_.insert(out.words_.end(), words.begin(), words.end());
        return out;
    }();
    return v;
}

std::int64_t Vocabulary::id(const std::string& word) const {
    const auto it = std::lower_bound(words_.begin() + 1, words_.end(), word);
    if (it == words_.end() || *it != word) return kUnknownToken;
    return static_cast<std::int64_t>(it - words_.begin());
}

std::vector<std::string> Vocabulary::tokenize(const std::string& text) {
    std::string clean;
    for (char c : text) {
        const auto u = static_cast<unsigned char>(c);
        clean.push_back(std::isalnum(u) ? static_cast<char>(std::tolower(u)) : ' ');
    }
    std::istringstream in(clean);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

std::vector<std::int64_t> Vocabulary::encode(const std::string& text) const {
    std::vector<std::int64_t> ids;
    for (const auto& w : tokenize(text)) ids.push_back(id(w));
    if (ids.empty()) ids.push_back(kUnknownToken);
    return ids;
}

} // namespace taskgrid::localizer
