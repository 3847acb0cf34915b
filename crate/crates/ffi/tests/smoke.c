#include <stdio.h>
#include "tricount.h"

int main(void) {
    const uint64_t pairs[] = {0, 1, 0, 2, 0, 3, 1, 2, 1, 3, 2, 3};
    TcGraph *g = NULL;
    if (tc_graph_from_edges(pairs, 6, &g) != TC_STATUS_OK) return 10;

    TcRunOptions opts = tc_run_options_default();
    opts.algorithm = TC_ALGORITHM_DYNAMIC;
    opts.ranks = 3;
    opts.cost = TC_COST_DEGREE;
    TcReport *r = NULL;
    if (tc_run(g, &opts, &r) != TC_STATUS_OK) return 11;
    printf("triangles %llu ranks %zu\n", (unsigned long long)tc_report_total(r), tc_report_rank_count(r));

    opts.algorithm = 42;
    TcReport *bad = NULL;
    TcStatus s = tc_run(g, &opts, &bad);
    printf("%s: %s\n", tc_status_name(s), tc_last_error_message());

    tc_report_free(r);
    tc_graph_free(g);
    return s == TC_STATUS_INVALID_ARGUMENT ? 0 : 12;
}
