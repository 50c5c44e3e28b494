#pragma once

#include <cstddef>
#include <functional>

namespace exitwaves {

/// Runs body(i) for i in [0, n) on up to `threads` workers with a fixed
/// strided assignment. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace exitwaves
