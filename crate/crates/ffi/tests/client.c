#include <stdio.h>
#include "invbinom.h"

int main(void) {
    InvbinomContext *ctx = NULL;
    if (invbinom_context_new(NULL, &ctx) != INVBINOM_STATUS_OK) return 1;

    char *f = NULL;
    if (invbinom_f_exact(ctx, 12, &f) != INVBINOM_STATUS_OK) return 2;
    printf("f(12) = %s\n", f);
    invbinom_string_free(f);

    int64_t nu = 0;
    if (invbinom_f_valuation(ctx, 12, 23, &nu) != INVBINOM_STATUS_OK) return 3;
    printf("nu_23 = %lld\n", (long long)nu);

    InvbinomScan *scan = NULL;
    if (invbinom_scan_wieferich(2, 10000, &scan) != INVBINOM_STATUS_OK) return 4;
    printf("wieferich");
    for (size_t i = 0; i < invbinom_scan_len(scan); i++) {
        InvbinomScanRow row;
        invbinom_scan_get(scan, i, &row);
        printf(" %llu", (unsigned long long)row.p);
    }
    printf("\n");
    invbinom_scan_free(scan);

    if (invbinom_f_valuation(ctx, 5, 9, &nu) != INVBINOM_STATUS_NOT_PRIME) return 5;
    printf("not prime: %s\n", invbinom_last_error());

    invbinom_context_free(ctx);
    return 0;
}
