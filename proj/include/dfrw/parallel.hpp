#pragma once

#include <cstddef>
#include <functional>

namespace dfrw {

/// Worker count used when a caller passes 0. Defaults to hardware concurrency.
unsigned default_threads();
void set_default_threads(unsigned n);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Callers write
/// results into per-index slots, so output does not depend on scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace dfrw
