#pragma once

#include <string>
#include <vector>

#include "gso/linalg.hpp"
#include "gso/model.hpp"

namespace gso {

/// Shortest round-trip decimal rendering, locale independent.
std::string format_double(double value);

/// CSV: one matrix row per line, comma separated, '.' decimal point, LF line
/// endings. Readers reject NaN/Inf entries and ragged rows.
Matrix read_matrix_csv(const std::string& path);
std::string matrix_to_csv(const Matrix& m);

/// MatrixMarket array format (column-major entries).
Matrix read_matrix_market(const std::string& path);
std::string matrix_to_matrix_market(const Matrix& m);

/// Dispatches on the .mtx extension, CSV otherwise.
Matrix read_matrix_auto(const std::string& path);

/// A vector is a single-column or single-row matrix.
Vector read_vector(const std::string& path);

std::string vector_to_csv_lines(const Vector& v);

/// Partition file: a JSON array of group sizes, e.g. [8,8,8]. The sizes must
/// sum to expected_n (pass 0 to skip the check).
GroupPartition read_partition_json(const std::string& path, std::size_t expected_n);

/// Writes via a temp file in the same directory plus rename, so readers never
/// observe partial content.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace gso
