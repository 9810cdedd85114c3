#include <stdio.h>
#include <string.h>

#include "promptcheck.h"

static const char *CLIQUE =
    "{\"states\": [{\"id\": \"a\", \"labels\": [\"A\"]}, {\"id\": \"b\", \"labels\": [\"B\"]}],"
    " \"init\": \"a\", \"transitions\": [[\"a\", \"a\"], [\"a\", \"b\"], [\"b\", \"a\"], [\"b\", \"b\"]]}";

int main(void) {
    PcLts *lts = NULL;
    PcFormula *formula = NULL;
    PcVerdict *verdict = NULL;

    if (pc_lts_from_json(CLIQUE, &lts) != PC_STATUS_OK) {
        fprintf(stderr, "lts: %s\n", pc_last_error_message());
        return 2;
    }
    if (pc_formula_parse("FPinf A | FPinf B", &formula) != PC_STATUS_OK) {
        fprintf(stderr, "formula: %s\n", pc_last_error_message());
        return 2;
    }
    if (pc_check(lts, formula, PC_MODE_UNIVERSAL, &verdict) != PC_STATUS_OK) {
        fprintf(stderr, "check: %s\n", pc_last_error_message());
        return 2;
    }
    char *json = pc_verdict_to_json(verdict);
    printf("%s\n", json);
    int holds = pc_verdict_holds(verdict);
    pc_string_free(json);

    PcFormula *bad = NULL;
    PcStatus status = pc_formula_parse("FPinf (A", &bad);
    int syntax_reported = status == PC_STATUS_SYNTAX && strlen(pc_last_error_message()) > 0;

    pc_verdict_free(verdict);
    pc_formula_free(formula);
    pc_lts_free(lts);
    return (!holds && syntax_reported) ? 0 : 1;
}
