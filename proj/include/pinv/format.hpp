#pragma once

#include "pinv/matrix.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pinv {

/// Shortest decimal text that parses back to exactly `value` ("2", "-0.25", "1e-07").
std::string format_number(double value);

/// Strict parse of one decimal literal: optional sign, fraction and exponent,
/// no surrounding whitespace. Throws ParseError.
double parse_number(std::string_view token);

/// Comma-joined list of canonical numbers.
std::string join_numbers(std::span<const double> values);

/// Inverse of join_numbers. An empty string yields an empty list.
std::vector<double> split_numbers(std::string_view text);

/// R format: every element, row-major, comma separated, no spaces.
std::string to_r_string(const DenseMatrix& a);
DenseMatrix from_r_string(std::string_view text, std::size_t rows, std::size_t cols,
                          Backend backend = Backend::Flat);

/// mR format: one R-serialized record per matrix row.
std::vector<std::string> to_mr_records(const DenseMatrix& a);
DenseMatrix from_mr_records(const std::vector<std::string>& records, std::size_t cols,
                            Backend backend = Backend::Flat);

/**
 * Matrix text as typed into a form or uploaded as a .txt file: one row per
 * non-empty line. If the payload contains a comma anywhere, elements are
 * comma separated; otherwise they are separated by runs of whitespace.
 *
 * Throws Empty, RaggedRows or ParseError.
 */
DenseMatrix parse_matrix_text(std::string_view text, Backend backend = Backend::Flat);

/// "mxn", the dimension key of the store.
std::string dimension_string(std::size_t rows, std::size_t cols);

struct Dimension {
    std::size_t rows;
    std::size_t cols;
};
Dimension parse_dimension(std::string_view text);

/// Round half away from zero to `places` decimals, trim trailing zeros and
/// print "-0" as "0". For display only.
std::string display_round(double value, int places = 3);
std::vector<std::string> display_round(const DenseMatrix& a, int places = 3);

} // namespace pinv
