#include <math.h>
#include <stdio.h>
#include <string.h>

#include "rrules.h"

#define CHECK(call)                                                      \
    do {                                                                 \
        enum RrStatus s = (call);                                        \
        if (s != RR_STATUS_OK) {                                         \
            fprintf(stderr, "%s -> %d: %s\n", #call, s, rr_last_error()); \
            return 1;                                                    \
        }                                                                \
    } while (0)

int main(void) {
    RrDataset *d = NULL;
    RrRuleSet *rs = NULL;
    size_t rows = 0, attributes = 0, classes = 0, n = 0, cls = 0, violations = 0;
    bool passed = false;
    RrMetrics m;
    char *text = NULL;

    CHECK(rr_dataset_fixture("toy", &d));
    CHECK(rr_dataset_shape(d, &rows, &attributes, &classes));
    CHECK(rr_induce(d, RR_ALGORITHM_RRULES, &rs));
    CHECK(rr_ruleset_len(rs, &n));
    CHECK(rr_ruleset_predict_row(rs, d, 4, &cls));
    CHECK(rr_verify(rs, d, &passed, &violations));
    CHECK(rr_metrics(rs, d, NULL, &m));
    CHECK(rr_ruleset_dump(rs, &text));
    printf("%zu %zu %zu %zu %zu %d %.2f %d\n", rows, attributes, classes, n, cls, passed, m.overall_coverage,
           isnan(m.test_accuracy));
    int has_default = strstr(text, "DEFAULT 0") != NULL;
    rr_string_free(text);

    if (rr_dataset_fixture("nope", &d) != RR_STATUS_INVALID_ARGUMENT || rr_last_error() == NULL) {
        return 2;
    }
    rr_ruleset_free(rs);
    rr_dataset_free(d);
    return has_default ? 0 : 3;
}
