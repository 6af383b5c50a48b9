#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sopf/tensor_ops.hpp"

namespace sopf::io {

/// A time-indexed table: one row per time stamp, one column per variable.
struct TimeTable {
  std::vector<std::string> names;  ///< variable names, without the leading "t"
  std::vector<double> t;
  Matrix data;                     ///< variables x time (columns are snapshots)
};

/// Header "t,<prefix>_1,...,<prefix>_n", then one row per column of `data`,
/// printed with 17 significant digits.
void write_time_csv(const std::filesystem::path& path, const std::vector<double>& t,
                    const Matrix& data, const std::string& prefix);

TimeTable read_time_csv(const std::filesystem::path& path);

/// Header line "SOPF1 <rows> <cols>\n" followed by rows*cols little-endian
/// IEEE-754 doubles in row-major order.
void write_binary(const std::filesystem::path& path, const Matrix& m);
Matrix read_binary(const std::filesystem::path& path);

/// Two-column CSV "step,loss".
void write_loss_history(const std::filesystem::path& path, const std::vector<double>& loss);

}  // namespace sopf::io
