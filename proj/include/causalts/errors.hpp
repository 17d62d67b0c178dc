#ifndef CAUSALTS_ERRORS_HPP
#define CAUSALTS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace causalts {

// Error taxonomy shared by the library and the CLI. Each class maps to a fixed
// process exit code so scripted pipelines can branch on failure kind.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct MissingArtifactError : std::runtime_error {
    explicit MissingArtifactError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace exit_code {
constexpr int ok = 0;
constexpr int config = 2;
constexpr int data = 3;
constexpr int numeric = 4;
constexpr int missing_artifact = 5;
}  // namespace exit_code

}  // namespace causalts

#endif
