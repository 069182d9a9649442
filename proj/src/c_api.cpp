#include "fraclab/fraclab.h"

#include "fraclab/commands.hpp"
#include "fraclab/psido.hpp"

#include <memory>
#include <string>

struct fraclab_graph {
    std::shared_ptr<const fraclab::FractalGraph> g;
};

struct fraclab_basis {
    fraclab::EigenBasis b;
};

struct fraclab_report {
    fraclab::CommandResult r;
};

namespace {

thread_local std::string g_error;

fraclab_status fail(fraclab_status s, const std::string& msg) {
    g_error = msg;
    return s;
}

// runs f, translating exceptions into status codes
template <class F>
fraclab_status guarded(F&& f) {
    g_error.clear();
    try {
        return f();
    } catch (const fraclab::Error& e) {
        switch (e.kind()) {
            case fraclab::ErrorKind::Config: return fail(FRACLAB_CONFIG_ERROR, e.what());
            case fraclab::ErrorKind::Numeric: return fail(FRACLAB_NUMERIC_ERROR, e.what());
            case fraclab::ErrorKind::Check: return fail(FRACLAB_CHECK_FAILED, e.what());
        }
        return fail(FRACLAB_INTERNAL_ERROR, e.what());
    } catch (const std::bad_alloc&) {
        return fail(FRACLAB_INTERNAL_ERROR, "out of memory");
    } catch (const std::exception& e) {
        return fail(FRACLAB_INTERNAL_ERROR, e.what());
    }
}

#define NEED(p)                                                      \
    do {                                                             \
        if (!(p)) return fail(FRACLAB_CONFIG_ERROR, #p " is NULL"); \
    } while (0)

}  // namespace

extern "C" {

const char* fraclab_version(void) { return "1.0.0"; }

const char* fraclab_last_error(void) { return g_error.c_str(); }

void fraclab_set_threads(int n) { fraclab::set_threads(n); }

fraclab_status fraclab_graph_build(const char* kind, int level, fraclab_graph** out) {
    NEED(kind);
    NEED(out);
    *out = nullptr;
    return guarded([&] {
        auto h = std::make_unique<fraclab_graph>();
        h->g = std::make_shared<const fraclab::FractalGraph>(fraclab::build(fraclab::parse_kind(kind), level));
        *out = h.release();
        return FRACLAB_OK;
    });
}

void fraclab_graph_free(fraclab_graph* g) { delete g; }

int fraclab_graph_vertex_count(const fraclab_graph* g) { return g ? g->g->size() : -1; }

fraclab_status fraclab_graph_dimension(const fraclab_graph* g, double* d) {
    NEED(g);
    NEED(d);
    return guarded([&] {
        *d = fraclab::measured_d(*g->g);
        return FRACLAB_OK;
    });
}

fraclab_status fraclab_graph_resistance(const fraclab_graph* g, int x, int y, double* r) {
    NEED(g);
    NEED(r);
    if (x < 0 || y < 0 || x >= g->g->size() || y >= g->g->size())
        return fail(FRACLAB_CONFIG_ERROR, "vertex index out of range");
    return guarded([&] {
        *r = fraclab::resistance(*g->g, x, y);
        return FRACLAB_OK;
    });
}

fraclab_status fraclab_basis_solve(const fraclab_graph* g, const char* bc, int plain, int keep_zero_mode,
                                   const char* cache_dir, fraclab_basis** out) {
    NEED(g);
    NEED(bc);
    NEED(out);
    *out = nullptr;
    return guarded([&] {
        fraclab::EigenOptions eo;
        eo.plain = plain != 0;
        eo.keep_zero_mode = keep_zero_mode != 0;
        eo.cache_dir = cache_dir ? cache_dir : "";
        auto h = std::make_unique<fraclab_basis>();
        h->b = fraclab::eigensolve(g->g, fraclab::parse_bc(bc), eo);
        *out = h.release();
        return FRACLAB_OK;
    });
}

void fraclab_basis_free(fraclab_basis* b) { delete b; }

int fraclab_basis_size(const fraclab_basis* b) { return b ? b->b.size() : -1; }

int fraclab_basis_rows(const fraclab_basis* b) { return b ? b->b.rows() : -1; }

fraclab_status fraclab_basis_eigenvalues(const fraclab_basis* b, double* out, size_t cap) {
    NEED(b);
    NEED(out);
    if (cap < static_cast<size_t>(b->b.size())) return fail(FRACLAB_CONFIG_ERROR, "output buffer too small");
    for (int i = 0; i < b->b.size(); ++i) out[i] = b->b.eigenvalues[i];
    return FRACLAB_OK;
}

fraclab_status fraclab_apply_symbol(const fraclab_basis* b, const char* symbol, const double* u_re,
                                    const double* u_im, double* out_re, double* out_im) {
    NEED(b);
    NEED(symbol);
    NEED(u_re);
    NEED(out_re);
    return guarded([&] {
        const int n = b->b.rows();
        fraclab::CVec u(n);
        for (int i = 0; i < n; ++i) u[i] = fraclab::cplx(u_re[i], u_im ? u_im[i] : 0.0);
        fraclab::CVec v = fraclab::apply(fraclab::parse_symbol(symbol), b->b, u);
        bool real = true;
        for (int i = 0; i < n; ++i) {
            out_re[i] = v[i].real();
            if (out_im) out_im[i] = v[i].imag();
            if (v[i].imag() != 0) real = false;
        }
        if (!out_im && !real) return fail(FRACLAB_CONFIG_ERROR, "complex result but out_im is NULL");
        return FRACLAB_OK;
    });
}

fraclab_status fraclab_run(const char* command, const char* config_json, fraclab_report** out) {
    NEED(command);
    NEED(out);
    *out = nullptr;
    return guarded([&] {
        auto h = std::make_unique<fraclab_report>();
        h->r = fraclab::run_command(command, config_json ? config_json : "");
        fraclab_status s = h->r.status == 0 ? FRACLAB_OK : FRACLAB_CHECK_FAILED;
        *out = h.release();
        return s;
    });
}

int fraclab_report_status(const fraclab_report* r) { return r ? r->r.status : -1; }

const char* fraclab_report_json(const fraclab_report* r) { return r ? r->r.json.c_str() : ""; }

const char* fraclab_report_csv(const fraclab_report* r) { return r ? r->r.csv.c_str() : ""; }

const char* fraclab_report_text(const fraclab_report* r) { return r ? r->r.text.c_str() : ""; }

void fraclab_report_free(fraclab_report* r) { delete r; }

}  // extern "C"
