#pragma once

#include <filesystem>
#include <string>

namespace slt {

// Throws IoError when the file cannot be opened or read.
std::string read_text_file(const std::filesystem::path& path);

// Creates parent directories as needed; throws IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Lowercase hex SHA-256 digests.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace slt
