#include <math.h>
#include <stdio.h>
#include "sixlevel.h"

int main(void) {
    SixlevelModel *m = NULL;
    if (sixlevel_model_new(NULL, &m) != SIXLEVEL_STATUS_OK) return 1;

    double len = 0.0;
    if (sixlevel_length_for_phase(m, 5.0 * M_PI, &len) != SIXLEVEL_STATUS_OK) return 2;
    SixlevelPhases p;
    if (sixlevel_phases(m, len, &p) != SIXLEVEL_STATUS_OK) return 3;
    printf("%.12e %.12f\n", len, p.zeta);

    if (sixlevel_model_new("{\"schema_version\": 9}", &m) != SIXLEVEL_STATUS_INVALID_INPUT) return 4;
    if (sixlevel_last_error() == NULL) return 5;
    sixlevel_model_free(m);
    return 0;
}
