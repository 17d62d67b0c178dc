#ifndef CAUSALTS_ARTIFACTS_HPP
#define CAUSALTS_ARTIFACTS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace causalts {

// FNV-1a 64-bit content hash of a file. Throws MissingArtifactError when the
// file cannot be opened.
std::uint64_t fnv1a64_file(const std::string& path);
std::string fnv1a64_hex(std::uint64_t hash);

// Reproducibility record written next to a run's outputs: the command, the
// seed, and content hashes of every input and output file. Contains no
// timestamps so that identical runs produce identical manifests.
class Manifest {
public:
    Manifest(std::string command, std::uint64_t seed);

    // recorded_path lands in the manifest; actual_path is hashed now.
    void add_input(const std::string& recorded_path, const std::string& actual_path);
    void add_output(const std::string& recorded_path, const std::string& actual_path);

    void write(const std::string& path) const;
    std::string to_json() const;

private:
    struct Entry {
        std::string path;
        std::string hash;
    };
    std::string command_;
    std::uint64_t seed_;
    std::vector<Entry> inputs_;
    std::vector<Entry> outputs_;
};

}  // namespace causalts

#endif
