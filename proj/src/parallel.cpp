#include "steinlab/parallel.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace steinlab {

namespace {
int g_cap = 0;

int env_cap() {
  static const int cap = [] {
    const char* s = std::getenv("STEINLAB_THREADS");
    if (!s) return 0;
    const int v = std::atoi(s);
    return v > 0 ? v : 0;
  }();
  return cap;
}
}  // namespace

int thread_cap() {
  if (g_cap > 0) return g_cap;
  int hw = 1;
#ifdef _OPENMP
  hw = omp_get_max_threads();
#endif
  const int env = env_cap();
  if (env > 0 && env < hw) return env;
  return hw;
}

void set_thread_cap(int n) { g_cap = n > 0 ? n : 0; }

}  // namespace steinlab
