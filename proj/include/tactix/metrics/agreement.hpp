// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tactix {

/// Rows are units, columns annotators; nullopt marks a missing label.
using AnnotationMatrix = std::vector<std::vector<std::optional<std::string>>>;

/// Nominal Krippendorff's alpha from the coincidence matrix. Requires at
/// least two units carrying two or more labels (std::invalid_argument
/// otherwise). Zero expected disagreement yields 1.
double krippendorff_alpha(const AnnotationMatrix& data);

}  // namespace tactix
