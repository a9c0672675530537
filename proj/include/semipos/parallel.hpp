#pragma once

#include <cstddef>
#include <functional>

namespace semipos {

/// Worker count used by parallel_for (default 1; SEMIPOS_THREADS overrides).
int thread_count();
void set_thread_count(int n);

/// Calls body(i) for i in [0, n). Bodies must write only to slot i of a
/// pre-sized output so that results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace semipos
