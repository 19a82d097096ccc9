#pragma once

#include <cstddef>
#include <functional>

namespace plurikit {

//! Caps worker threads for all parallel loops; 0 restores the default
//! (hardware concurrency). Results never depend on this value.
void set_max_threads(unsigned threads);
unsigned max_threads();

//! Runs body(i) for i in [0, count). Items must write disjoint outputs.
//! The first exception thrown by any item is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace plurikit
