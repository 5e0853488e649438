#include "engel_cartan.h"
#include <stdio.h>
#include <string.h>

int main(void) {
    EcStructure *s = ec_structure_cubic();
    if (!s) return 1;
    double out[4];
    if (ec_essential_curvatures(s, NULL, 4, 0.0, out) != EC_STATUS_OK) return 2;
    for (int i = 0; i < 4; i++)
        if (out[i] > 1e-9 || out[i] < -1e-9) return 3;
    bool flat; double residual;
    if (ec_flatness_test(s, NULL, 0, 4, &flat, &residual) != EC_STATUS_OK || !flat) return 4;
    ec_structure_free(s);

    EcStructure *bad = NULL;
    if (ec_structure_from_manifest("format = 9", &bad) != EC_STATUS_PARSE) return 5;
    if (strlen(ec_last_error()) == 0) return 6;

    char *json = ec_cohomology_report_json();
    if (!json || !strstr(json, "\"h2_dimension\": 4")) return 7;
    ec_string_free(json);
    printf("C smoke test: ok (default order %u)\n", ec_default_order());
    return 0;
}
