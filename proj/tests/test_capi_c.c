/* Pure C consumer: proves the public header compiles and links as C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "airylab.h"

static int failures = 0;
#define CHECK(cond)                                                    \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "[FAIL] %s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

int main(void) {
  double v = 0.0;
  CHECK(airylab_airy_ai(0.0, &v) == AIRYLAB_OK);
  CHECK(fabs(v - 0.3550280539) < 1e-9);
  CHECK(airylab_airy_ai(1e9, &v) == AIRYLAB_ERR_RANGE);

  airylab_rng* rng = NULL;
  CHECK(airylab_rng_create(1, 2, &rng) == AIRYLAB_OK);
  double u = 0.0;
  CHECK(airylab_rng_uniform(rng, &u) == AIRYLAB_OK);
  CHECK(u > 0.0 && u <= 1.0);
  airylab_rng_destroy(rng);

  double ev[8];
  CHECK(airylab_sample_gue(8, 3, 4, ev) == AIRYLAB_OK);
  CHECK(ev[0] > ev[7]);

  airylab_ensemble* e = NULL;
  CHECK(airylab_simulate_melon(1, 1.0, 4, 1.0, 5, 6, &e) == AIRYLAB_OK);
  int lines = 0;
  CHECK(airylab_ensemble_lines(e, &lines) == AIRYLAB_OK && lines == 1);
  airylab_ensemble_destroy(e);

  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  puts("c api smoke ok");
  return 0;
}
