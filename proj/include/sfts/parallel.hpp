#ifndef SFTS_PARALLEL_HPP
#define SFTS_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace sfts {

/// Global worker count used by parallel_for. 0 means "hardware concurrency".
void set_parallelism(int degree);
int parallelism();

/// Runs fn(i) for i in [0, n). Each index writes only its own outputs, so the
/// result is bitwise independent of the worker count. Exceptions thrown by fn
/// are captured and rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sfts

#endif
