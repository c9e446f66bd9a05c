#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "leocov/config.hpp"

namespace leocov {

struct SweepRowError {
    size_t row;
    std::string message;
};

struct SweepRun {
    std::string csv;
    std::vector<SweepRowError> errors;
    std::uint64_t fingerprint;
};

/// Evaluates every swept value and renders the CSV table (header row, '.'
/// decimals, one stderr column per Monte Carlo output, trailing error
/// column). Rows are computed on up to `workers` threads but emitted in
/// swept-value order, and the result depends only on the config and its
/// seed. Per-row failures land in the error column and the run continues.
SweepRun run_sweep(const LoadedConfig& cfg, int workers, std::ostream* progress);

} // namespace leocov
