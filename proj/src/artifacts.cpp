#include "causalts/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <utility>

#include "json.hpp"

#include "causalts/errors.hpp"

namespace causalts {

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("cannot hash missing file: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[8192];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return hash;
}

std::string fnv1a64_hex(std::uint64_t hash) {
    char out[19];
    std::snprintf(out, sizeof(out), "0x%016llx", static_cast<unsigned long long>(hash));
    return std::string(out);
}

Manifest::Manifest(std::string command, std::uint64_t seed)
    : command_(std::move(command)), seed_(seed) {}

void Manifest::add_input(const std::string& recorded_path, const std::string& actual_path) {
    inputs_.push_back({recorded_path, fnv1a64_hex(fnv1a64_file(actual_path))});
}

void Manifest::add_output(const std::string& recorded_path, const std::string& actual_path) {
    outputs_.push_back({recorded_path, fnv1a64_hex(fnv1a64_file(actual_path))});
}

std::string Manifest::to_json() const {
    nlohmann::json j;
    j["command"] = command_;
    j["seed"] = seed_;
    auto dump_entries = [](const std::vector<Entry>& entries) {
        nlohmann::json arr = nlohmann::json::array();
        for (const Entry& e : entries) {
            nlohmann::json item;
            item["hash"] = e.hash;
            item["path"] = e.path;
            arr.push_back(std::move(item));
        }
        return arr;
    };
    j["inputs"] = dump_entries(inputs_);
    j["outputs"] = dump_entries(outputs_);
    return j.dump(2) + "\n";
}

void Manifest::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest to " + path);
    out << to_json();
    if (!out) throw DataError("manifest write failed for " + path);
}

}  // namespace causalts
