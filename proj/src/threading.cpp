#include "shrinkcount/threading.hpp"

#include <cstdlib>
#include <string>

namespace shrinkcount {

int max_threads() {
  if (const char* env = std::getenv("SHRINKCOUNT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
      // fall through to the hardware default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? static_cast<int>(hw) : 1;
}

}  // namespace shrinkcount
