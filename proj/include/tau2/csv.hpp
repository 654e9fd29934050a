#pragma once

#include "tau2/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tau2::csv {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Headerless CSV: one matrix row per line, ',' separated, '.' radix.
// Values are written with 17 significant digits so doubles round-trip.

Matrix read_matrix(std::istream& in);
Matrix read_matrix(const std::filesystem::path& path);

/// Accepts a single column (one value per line) or a single row.
Vector read_vector(std::istream& in);
Vector read_vector(const std::filesystem::path& path);

void write_matrix(std::ostream& out, const Matrix& m);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

/// One value per line.
void write_vector(std::ostream& out, const Vector& v);
void write_vector(const std::filesystem::path& path, const Vector& v);

std::string format_real(double value);

/// Inverse of format_real; surrounding blanks allowed, non-finite rejected.
double parse_real(std::string_view token);

}  // namespace tau2::csv
