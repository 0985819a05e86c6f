#pragma once

#include <cstddef>
#include <functional>

namespace kummer::par {

// Worker-count hint used by the suites.  Numeric results never depend on it:
// work is split into fixed chunks keyed by deterministic stream ids and the
// outputs are written into place by chunk index.
int worker_count();
void set_worker_count(int n);

// Runs fn(i) for i in [0, n_items); may execute on several threads.
// fn must only touch state owned by item i.
void parallel_for(std::size_t n_items, const std::function<void(std::size_t)>& fn);

}  // namespace kummer::par
