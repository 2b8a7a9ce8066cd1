#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

namespace hkbnet::csv {

/// Nine significant digits, `nan`/`inf` spelled in lowercase.
[[nodiscard]] std::string real(double v);

/// Opens `path` for writing in binary mode so line endings are always LF.
/// Throws hkbnet::Error when the file cannot be created.
[[nodiscard]] std::ofstream open(const std::filesystem::path& path);

}  // namespace hkbnet::csv
