#pragma once

#include <filesystem>
#include <string_view>

namespace fbsurf {

/// Writes bytes to a sibling temporary file and renames it over `path`, so a
/// reader never observes a partially written file. Throws Io on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace fbsurf
