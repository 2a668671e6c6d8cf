#pragma once

#include <cstddef>
#include <functional>

namespace neqt {

/// Worker count used by parallel_for; defaults to NEQT_THREADS or 1.
int thread_count();
void set_thread_count(int threads);

/// Runs body(i) for i in [0, count). Each index is visited exactly once;
/// callers write results into per-index slots so reductions stay ordered.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace neqt
