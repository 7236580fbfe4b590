#include "scatter/parallel.hpp"

#include <cstdlib>
#include <string>

namespace scatter {

unsigned worker_count() {
  if (const char* env = std::getenv("SCATTER_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

}  // namespace scatter
