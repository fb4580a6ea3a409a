#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>

namespace sdgame {

/// Writes through `fill` into a sibling temporary file and renames it over
/// `path`, so readers never see a partial artifact. Creates parent
/// directories. Throws Error("io", ...) on failure.
void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill);

void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest round-trip decimal representation, '.' separator.
std::string format_double(double v);

}  // namespace sdgame
