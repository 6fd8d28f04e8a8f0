#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace scribe {

/// Lowercase hex SHA-256 of a byte range.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);
std::string sha256_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames, creating parent
/// directories as needed.
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace scribe
