#include "minkvox/parallel.hpp"

#include <cstdlib>
#include <string>

namespace minkvox {

std::size_t thread_count() {
  static const std::size_t count = [] {
    if (const char* env = std::getenv("MINKVOX_THREADS")) {
      try {
        const long n = std::stol(env);
        if (n > 0) return static_cast<std::size_t>(n);
      } catch (...) {
      }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<std::size_t>(hw == 0 ? 1 : hw);
  }();
  return count;
}

}  // namespace minkvox
