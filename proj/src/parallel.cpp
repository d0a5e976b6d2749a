#include "hybrid/parallel.hpp"

#include <cstdlib>
#include <string>

namespace hybrid {

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HYBRID_SAMPLER_THREADS")) {
    try {
      const int value = std::stoi(env);
      if (value > 0) return value;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace hybrid
