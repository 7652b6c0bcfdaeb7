#pragma once

#include <cstddef>
#include <functional>

namespace qcoef {

/// Worker cap used by every parallel loop in the library. 0 means
/// std::thread::hardware_concurrency().
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs fn(i) for i in [0, count). Each index must write only its own output
/// slot; results are then independent of scheduling. The exception thrown by
/// the lowest failing index is rethrown. Nested calls run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace qcoef
