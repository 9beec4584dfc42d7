#pragma once

#include <string>
#include <vector>

#include "velo/design_space.hpp"

namespace velo {

/// Design file format: a header row with the schema's parameter names, one
/// design per row. Categoricals are written as labels, booleans as
/// true/false, reals with shortest round-trip formatting. Fields must not
/// contain commas; no quoting is applied.
void write_designs_csv(const std::string &path, const std::vector<Design> &designs,
                       const DesignSchema &schema);
std::string designs_to_csv(const std::vector<Design> &designs, const DesignSchema &schema);

/// Reads a design CSV. The header must list every schema parameter exactly
/// once (any column order). Unparseable cells raise IoError naming the row
/// and column.
std::vector<Design> read_designs_csv(const std::string &path, const DesignSchema &schema);
std::vector<Design> designs_from_csv(const std::string &text, const DesignSchema &schema);

/// Shortest-round-trip decimal formatting used by every writer.
std::string format_double(double v);

std::vector<std::string> split_csv_line(const std::string &line);

} // namespace velo
