// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tactix {

/// Word runs (letters, digits, underscore) and single punctuation characters.
std::vector<std::string> bleu_tokenize(std::string_view text);

/// 4-gram BLEU over token sequences: unigram precision unsmoothed, add-one
/// smoothing for n >= 2, multiplicative brevity penalty. Empty candidate -> 0.
double bleu_tokens(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);

double bleu(std::string_view candidate, std::string_view reference);

}  // namespace tactix
