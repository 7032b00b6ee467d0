#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "scv/matrix.hpp"

namespace scv {

/// Outcome of one sampled check or sweep.
/// worst_residual is the most adverse scaled residual seen; its sign
/// convention is per check (documented at each call site). witness holds a
/// serialized copy of the offending input whenever passed == false.
struct CheckReport {
    std::string name;
    bool passed = true;
    double worst_residual = 0.0;
    nlohmann::json witness;  // null unless a concrete witness exists
    long long samples = 0;
    std::uint64_t seed = 0;
    double elapsed_s = 0.0;
    std::vector<long long> residual_histogram;  // counts per magnitude decade

    /// Canonical JSON. Timing is emitted as 0 unless include_timing is set,
    /// so identical runs stay byte-identical.
    nlohmann::json to_json(bool include_timing = false) const;

    /// Histogram rows: name,bin_lo,bin_hi,count.
    std::string to_csv() const;

    /// Decade edges shared by all histograms: 0, 1e-16, ..., 1e4, inf.
    static const std::vector<double>& histogram_edges();
    static std::size_t histogram_bin(double magnitude);
};

nlohmann::json matrix_to_json(const SquareMatrix& A);
SquareMatrix matrix_from_json(const nlohmann::json& j);

/// Shared run parameters; defaults match the command-line defaults.
struct RunConfig {
    std::uint64_t seed = 42;
    long long samples = 100000;
    double tol = 1e-7;
    double quad_tol = 1e-10;
    int threads = 1;
    bool timings = false;
};

}  // namespace scv
