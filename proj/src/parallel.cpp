#include "cardiomesh/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cardiomesh {

void set_threads(int count) {
#ifdef _OPENMP
  if (count > 0) omp_set_num_threads(count);
#else
  (void)count;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace cardiomesh
