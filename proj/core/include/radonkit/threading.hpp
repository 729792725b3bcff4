#pragma once

#include <cstdint>
#include <functional>

namespace radonkit {

// Global worker count for parallel_for. Defaults to hardware_concurrency().
void set_num_threads(int n);
int num_threads();

// Splits [begin, end) into at most num_threads() contiguous chunks and runs
// body(chunk_begin, chunk_end) on each. Per-element work must not depend on
// the chunking, so results are bitwise identical for any worker count.
void parallel_for(int64_t begin, int64_t end, const std::function<void(int64_t, int64_t)>& body);

}  // namespace radonkit
