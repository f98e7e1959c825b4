#pragma once

#include <filesystem>
#include <string>

namespace sclera {

/// Writes via a sibling temporary file and a rename, so a failed run never
/// leaves a partial file behind. Throws DataError.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Throws DataError when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace sclera
