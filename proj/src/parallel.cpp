#include "dimlab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace dimlab {

unsigned resolve_threads(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv("DIMLAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace dimlab
