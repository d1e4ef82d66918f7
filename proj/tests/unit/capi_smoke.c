/* Compiles the public header as C and exercises a model through the shared library. */
#include <math.h>
#include <stdio.h>

#include "fermibath/fermibath.h"

int main(void) {
  fb_params p;
  fb_model* m = NULL;
  double n = -1, z1[2], z2[2];
  fb_default_params(&p);
  p.n0 = 1.0;
  if (fb_model_create(&p, NULL, &m) != FB_OK) {
    fprintf(stderr, "create: %s\n", fb_last_error());
    return 1;
  }
  if (fb_occupation(m, 0.0, &n) != FB_OK || fabs(n - 1.0) > 1e-12) return 2;
  if (fb_roots(m, z1, z2) != FB_OK || !(z2[0] < 0)) return 3;
  if (fb_occupation(NULL, 0.0, &n) != FB_ERR_NULL_POINTER) return 4;
  fb_model_destroy(m);
  printf("fermibath %s: C header ok\n", fb_version());
  return 0;
}
