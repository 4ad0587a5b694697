// SPDX-License-Identifier: Apache-2.0
#include "tactix/metrics/bleu.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

namespace tactix {

namespace {

bool word_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

using Gram = std::vector<std::string>;

std::map<Gram, int> count_grams(const std::vector<std::string>& toks, std::size_t n) {
    std::map<Gram, int> out;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) ++out[Gram(toks.begin() + i, toks.begin() + i + n)];
    return out;
}

}  // namespace

std::vector<std::string> bleu_tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        auto c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
        } else if (word_char(c)) {
            std::size_t j = i;
            while (j < text.size() && word_char(static_cast<unsigned char>(text[j]))) ++j;
            out.emplace_back(text.substr(i, j - i));
            i = j;
        } else {
            out.emplace_back(1, text[i]);
            ++i;
        }
    }
    return out;
}

double bleu_tokens(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
    if (cand.empty()) return 0.0;
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        auto c = count_grams(cand, n);
        auto r = count_grams(ref, n);
        int matched = 0;
        for (const auto& [g, k] : c)
            if (auto it = r.find(g); it != r.end()) matched += std::min(k, it->second);
        double total = cand.size() >= n ? static_cast<double>(cand.size() - n + 1) : 0.0;
        double p = n == 1 ? matched / total : (matched + 1.0) / (total + 1.0);
        if (p <= 0.0) return 0.0;
        log_sum += std::log(p);
    }
    double c = static_cast<double>(cand.size());
    double r = static_cast<double>(ref.size());
    double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
    return bp * std::exp(log_sum / 4.0);
}

double bleu(std::string_view candidate, std::string_view reference) {
    return bleu_tokens(bleu_tokenize(candidate), bleu_tokenize(reference));
}

}  // namespace tactix
