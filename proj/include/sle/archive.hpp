#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "sle/pathspace.hpp"

namespace sle {

inline constexpr std::uint32_t kArchiveVersion = 1;

/// Thrown for malformed or truncated archive bytes.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using AnyPath = std::variant<RealPath, ComplexPath>;

/// Little-endian binary archive of sampled paths ("SLEP" format).
///
/// The format stores dt, the samples and an optional terminal limit but no
/// lifetime. On read, paths with a terminal limit get lifetime count*dt and
/// paths without one are marked truncated at horizon count*dt.
std::string encode_archive(const std::vector<AnyPath>& paths);
std::vector<AnyPath> decode_archive(const std::string& bytes);

void write_archive(const std::filesystem::path& file, const std::vector<AnyPath>& paths);
std::vector<AnyPath> read_archive(const std::filesystem::path& file);

/// Writes to a temporary sibling and renames it over `file`.
void write_file_atomic(const std::filesystem::path& file, const std::string& contents);
std::string read_file(const std::filesystem::path& file);

}  // namespace sle
