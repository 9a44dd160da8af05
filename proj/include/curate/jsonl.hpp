#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace curate {

using Json = nlohmann::ordered_json;

namespace jsonl {

// Compact single-line rendering; invalid UTF-8 is replaced instead of throwing.
std::string dump(const Json& j);

// Calls `fn(line_number, line)` for each non-empty line. Throws std::runtime_error if
// the file cannot be opened.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, std::string_view)>& fn);

std::vector<Json> read_all(const std::filesystem::path& path);

// Writes to a sibling temp file and renames over the destination, so readers never
// observe a half-written file.
void write_atomic(const std::filesystem::path& path, std::string_view contents);
void write_all(const std::filesystem::path& path, const std::vector<Json>& records);

std::string read_file(const std::filesystem::path& path);

}  // namespace jsonl
}  // namespace curate
