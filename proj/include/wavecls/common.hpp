#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wavecls {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Invalid arguments or malformed configuration. CLI exit code 2.
struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Unusable input data (parse failures, single-class sets, ...). CLI exit code 3.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numeric breakdown (ill-conditioning, degenerate models). CLI exit code 4.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// splitmix64 step; used to derive independent per-cell seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace wavecls
