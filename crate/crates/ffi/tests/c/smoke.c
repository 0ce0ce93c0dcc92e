/* Drives the C ABI end to end. Exit status 0 means every step held. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "kkverify.h"

#define REQUIRE(cond)                                              \
    do {                                                           \
        if (!(cond)) {                                             \
            const char *m = kk_last_error_message();               \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond, \
                    m ? m : "no message");                         \
            return 1;                                              \
        }                                                          \
    } while (0)

int main(int argc, char **argv) {
    REQUIRE(argc == 2);

    KkExpr *e = NULL, *d = NULL;
    REQUIRE(kk_expr_parse("x^2*sin(y)", &e) == KK_STATUS_OK);
    REQUIRE(kk_expr_differentiate(e, "x", &d) == KK_STATUS_OK);
    const char *names[] = {"x", "y"};
    double values[] = {3.0, 0.5}, v = 0.0;
    REQUIRE(kk_expr_evaluate(d, names, values, 2, &v) == KK_STATUS_OK);
    REQUIRE(fabs(v - 6.0 * sin(0.5)) < 1e-12);
    kk_expr_free(d);
    kk_expr_free(e);

    REQUIRE(kk_expr_parse("x +", &e) == KK_STATUS_PARSE);
    REQUIRE(kk_last_error_message() != NULL);

    KkScenario *s = NULL;
    KkReport *r = NULL;
    REQUIRE(kk_scenario_load_path(argv[1], &s) == KK_STATUS_OK);
    REQUIRE(kk_report_run(s, 1.0, &r) == KK_STATUS_OK);
    size_t pass = 0, fail = 1, skip = 0;
    REQUIRE(kk_report_counts(r, &pass, &fail, &skip) == KK_STATUS_OK);
    REQUIRE(fail == 0 && pass + skip == 21);
    REQUIRE(kk_report_exit_code(r) == 0);
    char *json = NULL;
    REQUIRE(kk_report_to_json(r, &json) == KK_STATUS_OK);
    REQUIRE(strstr(json, "\"schema_version\"") != NULL);
    kk_string_free(json);
    kk_report_free(r);
    kk_scenario_free(s);

    double m = 0.0;
    REQUIRE(kk_min_action(1.0, 0.0, &m) == KK_STATUS_OK && m == 0.5);
    int64_t n = 0;
    bool q = false;
    REQUIRE(kk_quantization_check(1.5, 1.0, 0.0, 1e-6, &n, &q) == KK_STATUS_OK);
    REQUIRE(q && n == 3);
    puts("ok");
    return 0;
}
