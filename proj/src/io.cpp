#include "gso/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "gso/errors.hpp"

namespace gso {

namespace {

double parse_double(const std::string& token, const std::string& context) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw IoError(context + ": cannot parse number '" + token + "'");
  if (!std::isfinite(value)) throw IoError(context + ": non-finite entry rejected");
  return value;
}

std::vector<std::vector<double>> parse_csv_rows(const std::string& text,
                                                const std::string& context) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string token =
          line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      row.push_back(parse_double(token, context));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw IoError("format_double failed");
  return std::string(buf, ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed on " + path);
  return buf.str();
}

Matrix read_matrix_csv(const std::string& path) {
  const auto rows = parse_csv_rows(read_text_file(path), path);
  if (rows.empty()) throw IoError(path + ": empty matrix");
  const std::size_t cols = rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw IoError(path + ": ragged rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix read_matrix_market(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string header;
  if (!std::getline(in, header) || header.rfind("%%MatrixMarket", 0) != 0)
    throw IoError(path + ": missing MatrixMarket header");
  if (header.find("array") == std::string::npos || header.find("real") == std::string::npos)
    throw IoError(path + ": only 'array real' MatrixMarket files are supported");
  std::string line;
  std::size_t rows = 0, cols = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream dims(line);
    if (!(dims >> rows >> cols) || rows == 0 || cols == 0)
      throw IoError(path + ": bad dimension line");
    break;
  }
  Matrix m(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < rows; ++i) {
      std::string token;
      do {
        if (!std::getline(in, token)) throw IoError(path + ": truncated entries");
        if (!token.empty() && token[0] == '%') token.clear();
      } while (token.find_first_not_of(" \t\r") == std::string::npos);
      m(i, j) = parse_double(token, path);
    }
  }
  return m;
}

std::string matrix_to_matrix_market(const Matrix& m) {
  std::string out = "%%MatrixMarket matrix array real general\n";
  out += std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out += format_double(m(i, j)) + "\n";
  return out;
}

Matrix read_matrix_auto(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".mtx")
    return read_matrix_market(path);
  return read_matrix_csv(path);
}

Vector read_vector(const std::string& path) {
  const Matrix m = read_matrix_auto(path);
  if (m.cols() == 1 || m.rows() == 1) return m.data();
  throw IoError(path + ": expected a single-row or single-column vector");
}

std::string vector_to_csv_lines(const Vector& v) {
  std::string out;
  for (double t : v) out += format_double(t) + "\n";
  return out;
}

GroupPartition read_partition_json(const std::string& path, std::size_t expected_n) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  if (!doc.is_array()) throw IoError(path + ": expected a JSON array of group sizes");
  std::vector<std::size_t> sizes;
  for (const auto& item : doc) {
    if (!item.is_number_unsigned() || item.get<std::size_t>() == 0)
      throw IoError(path + ": group sizes must be positive integers");
    sizes.push_back(item.get<std::size_t>());
  }
  GroupPartition partition = GroupPartition::from_sizes(sizes);
  if (expected_n != 0 && partition.total_size() != expected_n)
    throw IoError(path + ": group sizes sum to " + std::to_string(partition.total_size()) +
                  ", expected " + std::to_string(expected_n));
  return partition;
}

void atomic_write_text(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.parent_path().empty() ? "." : target.parent_path();
  const fs::path tmp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed on " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("rename to " + path + " failed: " + ec.message());
}

}  // namespace gso
