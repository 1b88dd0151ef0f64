#pragma once

// Output helpers shared by the report writers.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace invcorr {

/// Shortest round-trip decimal form; "nan" / "inf" / "-inf" for non-finite values.
[[nodiscard]] std::string format_number(double x);

/// Lower-case hex SHA-256 of a byte string / file.
[[nodiscard]] std::string sha256_hex(std::string_view bytes);
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// One value per line under a single header cell.
[[nodiscard]] std::string one_column_csv(std::string_view header, std::span<const double> values);

}  // namespace invcorr
