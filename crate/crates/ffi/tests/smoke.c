#include <math.h>
#include <stdio.h>
#include "abplab.h"

int main(void) {
    AbpConfig *cfg = NULL;
    AbpRun *run = NULL;
    if (abp_config_builtin(&cfg) != ABP_STATUS_OK) return 1;
    if (abp_run(cfg, "equality-suite", 64, 1, &run) != ABP_STATUS_OK) {
        fprintf(stderr, "%s\n", abp_last_error());
        return 2;
    }
    size_t reports = 0;
    for (size_t s = 0; s < abp_run_len(run); s++) {
        size_t res, n;
        char *name = NULL;
        abp_run_summary(run, s, &name, &res, &n);
        for (size_t r = 0; r < n; r++) {
            AbpReport rep;
            abp_run_report(run, s, r, &rep);
            printf("%s %s %.6f %d\n", name, rep.id, rep.ratio, rep.pass);
            reports++;
        }
        abp_string_free(name);
    }
    int ok = abp_run_passed(run) && reports == 7;
    abp_run_free(run);
    abp_config_free(cfg);

    double lambda = 0.0;
    if (abp_principal_eigenvalue(ABP_OPERATOR_LAPLACE, "ball:3", 400, NAN, 1.0, 1.0, &lambda) != ABP_STATUS_OK) return 3;
    if (fabs(lambda - 9.8696044) > 1e-3) return 4;
    if (abp_principal_eigenvalue(ABP_OPERATOR_LAPLACE, "torus", 64, NAN, 1.0, 1.0, &lambda) != ABP_STATUS_INVALID_ARGUMENT) return 5;
    return ok ? 0 : 6;
}
