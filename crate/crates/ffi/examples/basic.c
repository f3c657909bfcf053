#include <math.h>
#include <stdio.h>

#include "sqzvac.h"

int main(void) {
    SqzParams params = {
        .gamma = 1.0,
        .epsilon = 0.25,
        .omega_rabi = 1.0,
        .delta = 0.2,
        .xi_abs = 0.3,
        .delta_n = 0.0,
        .delta_m = 0.05,
        .phase_model = SQZ_PHASE_CONSTANT,
        .phi = 0.4,
    };
    SqzModel *model = NULL;
    SqzStatus status = sqz_model_new(&params, &model);
    if (status != SQZ_STATUS_OK) {
        fprintf(stderr, "%s: %s\n", sqz_status_name(status), sqz_last_error());
        return 1;
    }

    double n, m;
    sqz_spectra(model, 0.0, &n, &m);
    printf("N(0) = %.17g\n|M(0)| = %.17g\n", n, m);

    SqzTimescales ts;
    if (sqz_timescales(model, &ts) != SQZ_STATUS_OK) {
        fprintf(stderr, "%s\n", sqz_last_error());
        return 1;
    }
    printf("Gamma = %.17g\ntau_C = %.17g\n", ts.gamma_decay, ts.tau_c);

    SqzSustainability sus;
    sqz_sustainability(model, &sus);
    printf("phi_star = %.17g\n", sus.phi_star);
    sqz_model_free(model);

    params.epsilon = 0.6;
    status = sqz_model_new(&params, &model);
    printf("rejected = %d\n", status == SQZ_STATUS_AMPLIFICATION_THRESHOLD);
    return 0;
}
