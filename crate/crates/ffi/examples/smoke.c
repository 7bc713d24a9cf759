/* Minimal C client: solve the exp(x)/x problem and print five eigenvalues.
 *
 *   cc -Icrates/ffi/include crates/ffi/examples/smoke.c \
 *      target/release/liblayereig_ffi.a -lm -lpthread -ldl -o smoke
 */
#include <stdio.h>

#include "layereig.h"

int main(void) {
    LeConfig cfg;
    le_config_default(&cfg);
    cfg.n = 12;

    LeSolution *sol = NULL;
    LeStatus st = le_solve(&cfg, &sol);
    if (st != LE_STATUS_OK) {
        fprintf(stderr, "solve failed (%d): %s\n", (int)st, le_last_error());
        return 1;
    }
    double lambda[5];
    if (le_solution_eigenvalues(sol, lambda, 5) != LE_STATUS_OK) {
        fprintf(stderr, "%s\n", le_last_error());
        le_solution_free(sol);
        return 1;
    }
    printf("layereig %s, %zu DOF\n", le_version(), le_solution_dof(sol));
    for (int k = 0; k < 5; ++k) {
        printf("lambda_%d = %.10f\n", k + 1, lambda[k]);
    }
    le_solution_free(sol);

    cfg.modes = 1000;
    st = le_solve(&cfg, &sol);
    printf("oversized request: status %d (%s)\n", (int)st, le_last_error());
    return st == LE_STATUS_K_TOO_LARGE ? 0 : 1;
}
