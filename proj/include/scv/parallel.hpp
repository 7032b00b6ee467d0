#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "scv/report.hpp"

namespace scv {

/// Result of scanning per-index residual values: the extreme value, the
/// index attaining it (ties resolved to the lowest index, so the outcome is
/// independent of the thread partition), and a magnitude histogram.
struct ScanStats {
    double worst = 0.0;
    long long worst_index = -1;
    std::vector<long long> histogram;
};

namespace detail {

template <class F>
ScanStats scan_impl(long long nsamples, int threads, F&& value_at, bool want_min) {
    const std::size_t nbins = CheckReport::histogram_edges().size() - 1;
    ScanStats total;
    total.worst = want_min ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
    total.histogram.assign(nbins, 0);
    if (nsamples <= 0) {
        total.worst = 0.0;
        return total;
    }

    threads = std::max(1, threads);
    const long long chunk = (nsamples + threads - 1) / threads;
    std::vector<ScanStats> partial(static_cast<std::size_t>(threads));
    for (auto& p : partial) {
        p.worst = total.worst;
        p.histogram.assign(nbins, 0);
    }

    auto run_range = [&](int w, long long lo, long long hi) {
        ScanStats& local = partial[static_cast<std::size_t>(w)];
        for (long long i = lo; i < hi; ++i) {
            const double v = value_at(i);
            local.histogram[CheckReport::histogram_bin(v)] += 1;
            const bool better = want_min ? (v < local.worst) : (v > local.worst);
            if (better || local.worst_index < 0) {
                local.worst = v;
                local.worst_index = i;
            }
        }
    };

    if (threads == 1) {
        run_range(0, 0, nsamples);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w) {
            const long long lo = w * chunk;
            const long long hi = std::min(nsamples, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, w, lo, hi);
        }
        for (auto& t : pool) t.join();
    }

    for (const auto& p : partial) {
        if (p.worst_index < 0) continue;
        const bool better = want_min ? (p.worst < total.worst) : (p.worst > total.worst);
        const bool tie = p.worst == total.worst &&
                         (total.worst_index < 0 || p.worst_index < total.worst_index);
        if (better || tie || total.worst_index < 0) {
            total.worst = p.worst;
            total.worst_index = p.worst_index;
        }
        for (std::size_t b = 0; b < nbins; ++b) total.histogram[b] += p.histogram[b];
    }
    return total;
}

}  // namespace detail

/// Minimum of value_at over [0, nsamples); value_at must be pure in the index.
template <class F>
ScanStats parallel_min_scan(long long nsamples, int threads, F&& value_at) {
    return detail::scan_impl(nsamples, threads, std::forward<F>(value_at), true);
}

/// Maximum of value_at over [0, nsamples).
template <class F>
ScanStats parallel_max_scan(long long nsamples, int threads, F&& value_at) {
    return detail::scan_impl(nsamples, threads, std::forward<F>(value_at), false);
}

}  // namespace scv
