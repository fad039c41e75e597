#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "ert.h"

#define CHECK(call)                                                        \
  do {                                                                     \
    ErtStatus s_ = (call);                                                 \
    if (s_ != ERT_STATUS_OK) {                                             \
      const char *m_ = ert_last_error();                                   \
      fprintf(stderr, "%s failed: %d %s\n", #call, s_, m_ ? m_ : "");      \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  ErtPhantom *phantom = NULL;
  CHECK(ert_phantom_paper(&phantom));

  ErtNodes nodes = {0, 2.0 / 64.0};
  ErtReconstructConfig cfg = ert_reconstruct_config_default();
  cfg.size = 48;
  cfg.ntheta = 96;
  cfg.ns = 96;

  ErtImage *f = NULL, *truth = NULL;
  CHECK(ert_reconstruct_phantom(phantom, 0.8, 1.0, nodes, &cfg, &f));
  CHECK(ert_phantom_rasterize(phantom, 48, true, &truth));

  double err = 0.0;
  CHECK(ert_image_relative_error(truth, f, &err));
  if (!(err < 0.5)) {
    fprintf(stderr, "relative error %g\n", err);
    return 1;
  }

  uint32_t nx = 0, ny = 0;
  CHECK(ert_image_dims(f, &nx, &ny));
  size_t len = 0;
  double *buf = malloc(sizeof(double) * nx * ny);
  CHECK(ert_image_data(f, buf, (size_t)nx * ny, &len));

  /* errors carry a message and a code */
  double x[2];
  const double a[2] = {0.8, 1.0}, z[2] = {2.0, 1.0};
  if (ert_forward_map(a, 2, z, x) != ERT_STATUS_DOMAIN || ert_last_error() == NULL) {
    fprintf(stderr, "expected a domain error\n");
    return 1;
  }

  printf("ert %s: %ux%u image, relative error %.3f\n", ert_version(), nx, ny, err);
  free(buf);
  ert_image_free(f);
  ert_image_free(truth);
  ert_phantom_free(phantom);
  return 0;
}
