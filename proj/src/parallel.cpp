#include "irrsio/parallel.hpp"

#include <cstdlib>
#include <string>

namespace irrsio {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("IRRSIO_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace irrsio
