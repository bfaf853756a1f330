#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cli_internal.hpp"

namespace reslab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void add_cell(std::string& row, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!row.empty() && row.back() != '\n') row += ',';
    row += buf;
}

void add_cell(std::string& row, long long v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%lld", v);
    if (!row.empty() && row.back() != '\n') row += ',';
    row += buf;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int finish_run(const std::string& command, const json& params, const json& problem,
               const json& det, const std::string& out_dir, RunOutput&& ro,
               double wall_seconds) {
    if (!ro.summary.is_null()) {
        json slim = params;
        if (slim.contains("pr")) slim.erase("pr");
        json summary = {{"command", command}, {"problem", problem},   {"params", slim},
                        {"results", ro.summary}, {"pass", ro.pass}};
        ro.files["summary.json"] = summary.dump(2) + "\n";
    }

    fs::create_directories(out_dir);
    json digests = json::object();
    for (const auto& [name, bytes] : ro.files) {
        std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!f) throw DataError("cannot write " + (fs::path(out_dir) / name).string());
        digests[name] = fnv1a_hex(bytes);
    }

    json manifest = {{"version", "0.1.0"},   {"command", command},
                     {"problem", problem},   {"det", det},
                     {"params", params},     {"wall_seconds", wall_seconds},
                     {"checks", json{{command, ro.pass}}}, {"outputs", digests}};
    std::ofstream mf(fs::path(out_dir) / "manifest.json", std::ios::binary);
    const std::string mb = manifest.dump(2) + "\n";
    mf.write(mb.data(), static_cast<std::streamsize>(mb.size()));
    if (!mf) throw DataError("cannot write manifest.json in " + out_dir);

    if (ro.partial) return 2;
    return ro.pass ? 0 : 1;
}

} // namespace reslab::cli
