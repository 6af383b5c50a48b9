#include "sopf/dataset_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace sopf::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::out | std::ios::trunc | mode);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t first = cell.find_first_not_of(' ');
    out.push_back(first == std::string::npos ? std::string{} : cell.substr(first));
  }
  return out;
}

double parse_double(const std::string& cell, const std::filesystem::path& path) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
    throw std::runtime_error(path.string() + ": bad number '" + cell + "'");
  }
  return v;
}

std::uint64_t to_little_endian(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::little) {
    return bits;
  } else {
    std::uint64_t out = 0;
    for (int b = 0; b < 8; ++b) out |= ((bits >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return out;
  }
}

}  // namespace

void write_time_csv(const std::filesystem::path& path, const std::vector<double>& t,
                    const Matrix& data, const std::string& prefix) {
  if (static_cast<Eigen::Index>(t.size()) != data.cols()) {
    throw std::invalid_argument("write_time_csv: one time stamp per column required");
  }
  std::ofstream out = open_out(path);
  out << "t";
  for (Eigen::Index r = 0; r < data.rows(); ++r) out << ',' << prefix << '_' << (r + 1);
  out << '\n' << std::setprecision(17);
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    out << t[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < data.rows(); ++r) out << ',' << data(r, c);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

TimeTable read_time_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  std::vector<std::string> header = split_commas(line);
  if (header.empty() || header.front() != "t") {
    throw std::runtime_error(path.string() + ": header must start with 't'");
  }
  TimeTable table;
  table.names.assign(header.begin() + 1, header.end());
  const auto width = static_cast<Eigen::Index>(table.names.size());
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_commas(line);
    if (static_cast<Eigen::Index>(cells.size()) != width + 1) {
      throw std::runtime_error(path.string() + ": ragged row");
    }
    table.t.push_back(parse_double(cells[0], path));
    for (std::size_t c = 1; c < cells.size(); ++c) values.push_back(parse_double(cells[c], path));
  }
  const auto rows = static_cast<Eigen::Index>(table.t.size());
  table.data = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>(values.data(), rows, width)
                   .transpose();
  return table;
}

void write_binary(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out = open_out(path, std::ios::binary);
  out << "SOPF1 " << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(m(r, c)));
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Matrix read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(path.string() + ": missing header");
  std::istringstream hs(header);
  std::string magic;
  long long rows = -1;
  long long cols = -1;
  hs >> magic >> rows >> cols;
  if (magic != "SOPF1" || rows < 0 || cols < 0) {
    throw std::runtime_error(path.string() + ": not a SOPF1 file");
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      std::uint64_t bits = 0;
      if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
        throw std::runtime_error(path.string() + ": truncated payload");
      }
      m(r, c) = std::bit_cast<double>(to_little_endian(bits));
    }
  }
  return m;
}

void write_loss_history(const std::filesystem::path& path, const std::vector<double>& loss) {
  std::ofstream out = open_out(path);
  out << "step,loss\n" << std::setprecision(17);
  for (std::size_t k = 0; k < loss.size(); ++k) out << k << ',' << loss[k] << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace sopf::io
