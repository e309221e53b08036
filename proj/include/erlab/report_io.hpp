#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace erlab {

/// 17 significant digits with '.' as separator, independent of the C locale.
std::string format_number(double value);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace erlab
