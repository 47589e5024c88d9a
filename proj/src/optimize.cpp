#include "scarsim/optimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <mutex>

#include "gsl_quiet.hpp"
#include "scarsim/error.hpp"

namespace scarsim {

void detail::quiet_gsl() {
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

namespace {

struct Closure {
    const std::function<double(const std::vector<double>&)>* f;
    std::vector<double> buffer;
};

double trampoline(const gsl_vector* v, void* params) {
    auto* c = static_cast<Closure*>(params);
    for (std::size_t i = 0; i < c->buffer.size(); ++i) c->buffer[i] = gsl_vector_get(v, i);
    return (*c->f)(c->buffer);
}

}  // namespace

SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                               const std::vector<double>& step, double size_tol, int max_iter) {
    detail::quiet_gsl();
    const std::size_t n = x0.size();
    if (n == 0 || step.size() != n) fail(ErrorKind::Config, "simplex start and step sizes differ");
    Closure closure{&f, std::vector<double>(n)};
    gsl_multimin_function fn{&trampoline, n, &closure};
    gsl_vector* x = gsl_vector_alloc(n);
    gsl_vector* ss = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) {
        gsl_vector_set(x, i, x0[i]);
        gsl_vector_set(ss, i, step[i]);
    }
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    gsl_multimin_fminimizer_set(s, &fn, x, ss);
    SimplexResult out;
    int status = GSL_CONTINUE;
    while (status == GSL_CONTINUE && out.iterations < max_iter) {
        ++out.iterations;
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), size_tol);
    }
    out.converged = status == GSL_SUCCESS;
    out.value = s->fval;
    out.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.x[i] = gsl_vector_get(s->x, i);
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(x);
    gsl_vector_free(ss);
    return out;
}

}  // namespace scarsim
