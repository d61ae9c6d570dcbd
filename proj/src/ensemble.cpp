#include "g2/ensemble.hpp"

#include <cstdlib>
#include <string>

namespace g2 {

int worker_count() {
  if (const char* env = std::getenv("G2_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace g2
