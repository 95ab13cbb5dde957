#include "navgen/text.hpp"

#include <array>
#include <cctype>

namespace navgen {

std::string to_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return std::string(text.substr(b, e - b));
}

std::vector<std::string> metric_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char raw : text) {
        const unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::vector<std::string> instruction_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        // Trim punctuation kept mid-token when it ends up at an edge.
        std::size_t b = 0, e = cur.size();
        while (b < e && (cur[b] == '.' || cur[b] == '\'')) ++b;
        while (e > b && (cur[e - 1] == '.' || cur[e - 1] == '\'')) --e;
        if (e > b) tokens.push_back(cur.substr(b, e - b));
        cur.clear();
    };
    for (char raw : text) {
        const unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (raw == '\'' || raw == '.') {
            cur.push_back(raw);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::string light_stem(std::string_view word) {
    static constexpr std::array<std::string_view, 5> kSuffixes = {"ing", "ed", "es", "ly", "s"};
    for (std::string_view suffix : kSuffixes) {
        if (word.size() >= suffix.size() + 3 && word.ends_with(suffix)) {
            return std::string(word.substr(0, word.size() - suffix.size()));
        }
    }
    return std::string(word);
}

}  // namespace navgen
