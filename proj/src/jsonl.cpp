#include "curate/jsonl.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace curate::jsonl {

std::string dump(const Json& j) {
    return j.dump(-1, ' ', false, nlohmann::detail::error_handler_t::replace);
}

void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, std::string_view)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        fn(number, line);
    }
    if (in.bad()) throw std::runtime_error("read error on " + path.string());
}

std::vector<Json> read_all(const std::filesystem::path& path) {
    std::vector<Json> out;
    for_each_line(path, [&](std::size_t number, std::string_view line) {
        try {
            out.push_back(Json::parse(line));
        } catch (const Json::parse_error& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    });
    return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_all(const std::filesystem::path& path, const std::vector<Json>& records) {
    std::string buf;
    for (const auto& r : records) {
        buf += dump(r);
        buf += '\n';
    }
    write_atomic(path, buf);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace curate::jsonl
