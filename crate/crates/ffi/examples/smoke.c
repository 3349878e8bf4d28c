/* Minimal C client: steady state of the lossless reference mode. */
#include <stdio.h>

#include "catsim.h"

int main(void) {
    CatsimModeParams p = {0.0, 1.0, {7.0710678118654755, -7.0710678118654755}, 0.0, 1.0};
    CatsimModel *model = NULL;
    CatsimState *vac = NULL, *ss = NULL;
    char msg[256];

    if (catsim_model_one_mode(&p, 30, &model) != CATSIM_STATUS_OK ||
        catsim_state_fock(30, 0, &vac) != CATSIM_STATUS_OK ||
        catsim_steady_state(model, CATSIM_STEADY_PROPAGATE, vac, 1e-6, &ss) != CATSIM_STATUS_OK) {
        catsim_last_error(msg, sizeof msg);
        fprintf(stderr, "catsim: %s\n", msg);
        return 1;
    }
    double n = 0.0, parity = 0.0;
    catsim_photon_number(ss, CATSIM_MODE_A, &n);
    catsim_parity(ss, CATSIM_MODE_A, &parity);
    printf("catsim %s: <n> = %.6f, <P> = %.6f\n", catsim_version(), n, parity);

    /* Errors come back as status codes. */
    CatsimStatus st = catsim_model_one_mode(&p, 1, &model);
    catsim_last_error(msg, sizeof msg);
    printf("status %d: %s\n", (int)st, msg);

    catsim_state_free(ss);
    catsim_state_free(vac);
    catsim_model_free(model);
    return 0;
}
