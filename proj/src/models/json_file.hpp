#pragma once

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "rfp/errors.hpp"

namespace rfp::models::detail {

using nlohmann::json;

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("cannot write " + path.string());
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

}  // namespace rfp::models::detail
