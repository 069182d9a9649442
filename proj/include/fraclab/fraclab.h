#ifndef FRACLAB_H
#define FRACLAB_H

#include <stddef.h>

#if defined(FRACLAB_BUILDING)
#define FRACLAB_API __attribute__((visibility("default")))
#else
#define FRACLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    FRACLAB_OK = 0,
    FRACLAB_CHECK_FAILED = 1,
    FRACLAB_CONFIG_ERROR = 2,
    FRACLAB_NUMERIC_ERROR = 3,
    FRACLAB_INTERNAL_ERROR = 4
} fraclab_status;

typedef struct fraclab_graph fraclab_graph;
typedef struct fraclab_basis fraclab_basis;
typedef struct fraclab_report fraclab_report;

FRACLAB_API const char* fraclab_version(void);
/* message of the last failed call on this thread, "" if none */
FRACLAB_API const char* fraclab_last_error(void);
FRACLAB_API void fraclab_set_threads(int n);

/* kind: "gasket", "double-cover" or "circle" (level = vertex count for the circle) */
FRACLAB_API fraclab_status fraclab_graph_build(const char* kind, int level, fraclab_graph** out);
FRACLAB_API void fraclab_graph_free(fraclab_graph* g);
FRACLAB_API int fraclab_graph_vertex_count(const fraclab_graph* g);
FRACLAB_API fraclab_status fraclab_graph_dimension(const fraclab_graph* g, double* d);
/* R(x, y) in the resistance metric */
FRACLAB_API fraclab_status fraclab_graph_resistance(const fraclab_graph* g, int x, int y, double* r);

/* bc: "dirichlet", "neumann" or "none"; cache_dir may be NULL */
FRACLAB_API fraclab_status fraclab_basis_solve(const fraclab_graph* g, const char* bc, int plain, int keep_zero_mode,
                                               const char* cache_dir, fraclab_basis** out);
FRACLAB_API void fraclab_basis_free(fraclab_basis* b);
FRACLAB_API int fraclab_basis_size(const fraclab_basis* b);
FRACLAB_API int fraclab_basis_rows(const fraclab_basis* b);
FRACLAB_API fraclab_status fraclab_basis_eigenvalues(const fraclab_basis* b, double* out, size_t cap);
/* p(-Delta) u over the active rows; u_im and out_im may be NULL for real data */
FRACLAB_API fraclab_status fraclab_apply_symbol(const fraclab_basis* b, const char* symbol, const double* u_re,
                                                const double* u_im, double* out_re, double* out_im);

/* Runs a command with a JSON object of parameters. The report is returned even when a check fails
   (status FRACLAB_CHECK_FAILED); on configuration or numeric errors *out is NULL. */
FRACLAB_API fraclab_status fraclab_run(const char* command, const char* config_json, fraclab_report** out);
FRACLAB_API int fraclab_report_status(const fraclab_report* r);
FRACLAB_API const char* fraclab_report_json(const fraclab_report* r);
FRACLAB_API const char* fraclab_report_csv(const fraclab_report* r);
FRACLAB_API const char* fraclab_report_text(const fraclab_report* r);
FRACLAB_API void fraclab_report_free(fraclab_report* r);

#ifdef __cplusplus
}
#endif

#endif
