#pragma once

#include <optional>
#include <string>

#include "qsel/types.hpp"

namespace qsel {

/// Reads a comma-separated file: first row header, '.' decimal separator,
/// UTF-8. When label_column names a header entry, that column is consumed
/// as the ground-truth labels and the remaining columns as features.
DataMatrix load_csv(const std::string& path,
                    const std::optional<std::string>& label_column = std::nullopt);

/// Writes the matrix (and labels, when present) back out; values are
/// printed with 17 significant digits so a reload is bit-identical.
void write_csv(const DataMatrix& data, const std::string& path);

/// Shortest-round-trip style formatting used for all numeric file output.
std::string format_double(double v);

}  // namespace qsel
