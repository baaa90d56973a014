#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <thread>
#include <vector>

namespace spdc {

/// Runs body(i) for i in [0, n) over `threads` workers in contiguous chunks.
/// Each index is written by exactly one worker, so results do not depend on
/// scheduling.
template <class Body> void parallel_for(Eigen::Index n, int threads, Body&& body) {
    const Eigen::Index workers = std::clamp<Eigen::Index>(threads, 1, std::max<Eigen::Index>(n, 1));
    if (workers == 1) {
        for (Eigen::Index i = 0; i < n; ++i) body(i);
        return;
    }
    const Eigen::Index chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (Eigen::Index w = 0; w < workers; ++w) {
        const Eigen::Index begin = w * chunk;
        const Eigen::Index end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &body] {
            for (Eigen::Index i = begin; i < end; ++i) body(i);
        });
    }
}

}  // namespace spdc
