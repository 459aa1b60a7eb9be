#include <math.h>
#include <stdio.h>
#include <string.h>

#include "dipne.h"

#define CHECK(call)                                                       \
    do {                                                                  \
        DipneStatus s_ = (call);                                          \
        if (s_ != DIPNE_STATUS_OK) {                                      \
            fprintf(stderr, "%s failed (%d): %s\n", #call, (int)s_,       \
                    dipne_last_error());                                  \
            return 1;                                                     \
        }                                                                 \
    } while (0)

int main(void) {
    DipneState *a = NULL, *b = NULL, *ab = NULL, *out = NULL;
    CHECK(dipne_coherent(0.6, 0.0, 20, &a));
    CHECK(dipne_coherent(0.0, 0.8, 20, &b));
    CHECK(dipne_tensor(a, b, &ab));
    CHECK(dipne_beamsplit(ab, 0, 1, 0.7853981633974483, &out));

    double n0 = 0.0, n1 = 0.0;
    CHECK(dipne_state_mean_photons(out, 0, &n0));
    CHECK(dipne_state_mean_photons(out, 1, &n1));
    if (fabs(n0 + n1 - 1.0) > 1e-9) {
        fprintf(stderr, "photons not conserved: %g\n", n0 + n1);
        return 1;
    }

    DipneState *bad = NULL;
    if (dipne_state_mean_photons(out, 5, &n0) != DIPNE_STATUS_INVALID_ARGUMENT ||
        strlen(dipne_last_error()) == 0) {
        fprintf(stderr, "expected an invalid-mode error\n");
        return 1;
    }
    if (dipne_kitten(10.0, 0.6, 5, 20, &bad, NULL) != DIPNE_STATUS_LEAKAGE || bad != NULL) {
        fprintf(stderr, "expected a leakage error\n");
        return 1;
    }

    char *csv = NULL;
    CHECK(dipne_run_experiment("gaussdrive", "r = 0, 4\n", &csv));
    int has_header = strstr(csv, "fraction_strong_limit") != NULL;
    dipne_string_free(csv);

    dipne_state_free(a);
    dipne_state_free(b);
    dipne_state_free(ab);
    dipne_state_free(out);
    printf("ok %s\n", dipne_version());
    return has_header ? 0 : 1;
}
