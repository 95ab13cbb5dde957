#include "navgen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "navgen/text.hpp"

namespace navgen {

namespace {

std::map<std::vector<std::string>, int> ngram_counts(const std::vector<std::string>& tokens,
                                                     std::size_t n) {
    std::map<std::vector<std::string>, int> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)] += 1;
    }
    return counts;
}

}  // namespace

double bleu_score(std::string_view candidate, std::string_view reference) {
    const std::vector<std::string> cand = metric_tokenize(candidate);
    const std::vector<std::string> ref = metric_tokenize(reference);
    if (cand.empty() || ref.empty()) return 0.0;

    const std::size_t max_n = std::min<std::size_t>(4, cand.size());
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= max_n; ++n) {
        const auto cand_counts = ngram_counts(cand, n);
        const auto ref_counts = ngram_counts(ref, n);
        int clipped = 0;
        int total = 0;
        for (const auto& [gram, count] : cand_counts) {
            total += count;
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) clipped += std::min(count, it->second);
        }
        if (total == 0 || clipped == 0) return 0.0;
        log_sum += std::log(static_cast<double>(clipped) / total);
    }
    const double geo_mean = std::exp(log_sum / static_cast<double>(max_n));

    const double c = static_cast<double>(cand.size());
    const double r = static_cast<double>(ref.size());
    const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
    return 100.0 * bp * geo_mean;
}

double rouge_l_score(std::string_view candidate, std::string_view reference) {
    const std::vector<std::string> cand = metric_tokenize(candidate);
    const std::vector<std::string> ref = metric_tokenize(reference);
    if (cand.empty() || ref.empty()) return 0.0;

    const std::size_t n = cand.size();
    const std::size_t m = ref.size();
    std::vector<std::size_t> prev(m + 1, 0);
    std::vector<std::size_t> cur(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            if (cand[i - 1] == ref[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    const double lcs = static_cast<double>(prev[m]);
    if (lcs == 0.0) return 0.0;
    const double precision = lcs / static_cast<double>(n);
    const double recall = lcs / static_cast<double>(m);
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace navgen
