#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldrg {

/// Data or usage errors: malformed files, inconsistent partitions, invalid
/// model configs, subgraphs over the enumeration cap. CLI maps these to
/// exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failures: singular matrices, suspected MLE nonexistence.
/// CLI maps these to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Sufficient statistics are integer counts; int64 avoids overflow for
/// every supported graph size (block sizes up to 2000).
using StatVector = std::vector<std::int64_t>;

inline std::int64_t pairs_of(std::int64_t a) { return a * (a - 1) / 2; }

} // namespace ldrg
