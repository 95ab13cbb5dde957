#include "navgen/interpret.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <regex>
#include <set>

#include "navgen/text.hpp"

namespace navgen {

namespace {

bool is_clock_word(const std::string& t) {
    return t == "o'clock" || t == "oclock";
}

const std::map<std::string, int>& direction_words() {
    static const std::map<std::string, int> words = {
        {"right", 3},   {"left", 9},     {"forward", 12}, {"straight", 12},
        {"back", 6},    {"backward", 6}, {"around", 6},
    };
    return words;
}

const std::map<std::string, double>& number_words() {
    static const std::map<std::string, double> words = {
        {"zero", 0},   {"one", 1},   {"two", 2},       {"three", 3},    {"four", 4},
        {"five", 5},   {"six", 6},   {"seven", 7},     {"eight", 8},    {"nine", 9},
        {"ten", 10},   {"eleven", 11}, {"twelve", 12}, {"thirteen", 13}, {"fourteen", 14},
        {"fifteen", 15}, {"sixteen", 16}, {"seventeen", 17}, {"eighteen", 18},
        {"nineteen", 19}, {"twenty", 20},
    };
    return words;
}

bool token_at(const std::vector<std::string>& tokens, std::size_t i, std::string_view word) {
    return i < tokens.size() && tokens[i] == word;
}

std::optional<int> extract_direction(const std::vector<std::string>& tokens) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& t = tokens[i];
        if (auto num = parse_number_token(t)) {
            if (i + 1 < tokens.size() && is_clock_word(tokens[i + 1])) {
                const double v = *num;
                if (v == std::floor(v) && v >= 1.0 && v <= 12.0) return static_cast<int>(v);
            }
            continue;
        }
        if (t == "slightly") {
            if (token_at(tokens, i + 1, "right")) return 1;
            if (token_at(tokens, i + 1, "left")) return 11;
            continue;
        }
        auto it = direction_words().find(t);
        if (it != direction_words().end()) return it->second;
    }
    return std::nullopt;
}

std::optional<double> extract_distance(const std::vector<std::string>& tokens) {
    static const std::set<std::string> kStepWords = {"step", "steps"};
    static const std::set<std::string> kMeterWords = {"meter", "meters", "metre", "metres", "m"};
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& t = tokens[i];
        if (auto num = parse_number_token(t)) {
            if (i + 1 < tokens.size() && is_clock_word(tokens[i + 1])) continue;
            if (i + 2 < tokens.size() && tokens[i + 1] == "small" && kStepWords.count(tokens[i + 2])) {
                return 0.5 * *num;
            }
            if (i + 1 < tokens.size() && kStepWords.count(tokens[i + 1])) {
                return 0.75 * *num;
            }
            if (i + 1 < tokens.size() && kMeterWords.count(tokens[i + 1])) {
                return *num;
            }
            continue;
        }
        if (t == "stop") return 0.0;
        if (t == "stay" && (token_at(tokens, i + 1, "where") || token_at(tokens, i + 1, "put"))) {
            return 0.0;
        }
        if (t == "hold" && token_at(tokens, i + 1, "your") && token_at(tokens, i + 2, "position")) {
            return 0.0;
        }
        if (t == "remain" && token_at(tokens, i + 1, "in") && token_at(tokens, i + 2, "place")) {
            return 0.0;
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<double> parse_number_token(const std::string& token) {
    if (token.empty()) return std::nullopt;
    auto it = number_words().find(token);
    if (it != number_words().end()) return it->second;
    bool seen_dot = false;
    for (char c : token) {
        if (c == '.') {
            if (seen_dot) return std::nullopt;
            seen_dot = true;
        } else if (c < '0' || c > '9') {
            return std::nullopt;
        }
    }
    return std::strtod(token.c_str(), nullptr);
}

FormatSplit split_format(std::string_view raw) {
    static const std::regex kPattern(
        R"(^<think>([\s\S]*?)</think>\n<answer>([\s\S]*?)</answer>$)");
    const std::string trimmed = trim(raw);

    std::smatch m;
    if (std::regex_match(trimmed, m, kPattern)) {
        return FormatSplit{true, m[1].str(), m[2].str(), ""};
    }

    FormatSplit out;
    out.ok = false;
    if (trimmed.rfind("<answer>", 0) == 0) {
        out.reason = "answer block before think block";
    } else if (trimmed.rfind("<think>", 0) != 0) {
        out.reason = "missing leading <think> tag";
    } else if (trimmed.find("</think>") == std::string::npos) {
        out.reason = "missing </think> tag";
    } else if (trimmed.find("</think>\n<answer>") == std::string::npos) {
        out.reason = "think and answer blocks must be separated by a single newline";
    } else if (trimmed.find("</answer>") == std::string::npos) {
        out.reason = "missing </answer> tag";
    } else if (!trimmed.ends_with("</answer>")) {
        out.reason = "trailing content after </answer>";
    } else {
        out.reason = "does not match the required pattern";
    }
    return out;
}

bool detect_alert(const std::vector<std::string>& tokens) {
    static const std::set<std::string> kLexicon = {"cane",     "curb",    "pole",
                                                   "traffic",  "obstacle", "crossing",
                                                   "careful",  "caution", "listen"};
    static const std::set<std::string> kAdvisory = {"careful", "carefully", "caution",
                                                    "cautious", "cautiously", "listen",
                                                    "beware",  "mind",      "warning",
                                                    "alert"};
    static const std::set<std::string> kLocational = {"near",  "nearby", "ahead",
                                                      "behind", "beside", "close"};

    auto deplural = [](const std::string& t) {
        if (t.size() > 3 && t.back() == 's') return t.substr(0, t.size() - 1);
        return t;
    };

    bool lexicon = false;
    bool advisory = false;
    bool locational = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string t = deplural(tokens[i]);
        if (kLexicon.count(t)) lexicon = true;
        if (kAdvisory.count(t)) advisory = true;
        if (kLocational.count(t)) locational = true;
        if (t == "watch" && token_at(tokens, i + 1, "out")) advisory = true;
        if (t == "be" && token_at(tokens, i + 1, "aware")) advisory = true;
        if (t == "your" && token_at(tokens, i + 1, "cane")) advisory = true;
        if ((t == "at" || t == "on" || t == "to") && token_at(tokens, i + 1, "your")) {
            locational = true;
        }
    }
    return lexicon && (advisory || locational);
}

Interpretation interpret(std::string_view text) {
    const FormatSplit split = split_format(text);
    const std::string target = split.ok ? split.answer : std::string(text);
    const std::vector<std::string> tokens = instruction_tokenize(target);

    Interpretation out;
    out.alert = detect_alert(tokens);

    const auto direction = extract_direction(tokens);
    const auto distance = extract_distance(tokens);
    if (direction && distance) {
        out.action = ActionInterpretation{*direction, quantize_distance(*distance), out.alert};
    }
    return out;
}

}  // namespace navgen
