#include "dicke3.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <new>
#include <string>

#include "dynamics.hpp"
#include "entanglement.hpp"

struct dicke3_eigensystem {
    dicke3::EigenSystem sys;
};

struct dicke3_trajectory {
    dicke3::Trajectory traj;
};

namespace {

using namespace dicke3;

thread_local std::string last_error;

dicke3_status set_error(dicke3_status status, const std::string& what) {
    last_error = what;
    return status;
}

dicke3_status map_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return DICKE3_ERR_INVALID_ARGUMENT;
    case ErrorCode::invalid_state: return DICKE3_ERR_INVALID_STATE;
    case ErrorCode::solver_failure: return DICKE3_ERR_SOLVER;
    case ErrorCode::io: return DICKE3_ERR_IO;
    }
    return DICKE3_ERR_INTERNAL;
}

template <typename Fn>
dicke3_status guarded(Fn&& fn) {
    last_error.clear();
    try {
        fn();
        return DICKE3_OK;
    } catch (const Error& e) {
        return set_error(map_code(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(DICKE3_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(DICKE3_ERR_INTERNAL, e.what());
    }
}

void require(bool cond, const char* what) {
    if (!cond) fail(ErrorCode::invalid_argument, what);
}

Method to_method(dicke3_method m) {
    switch (m) {
    case DICKE3_METHOD_EXACT: return Method::exact;
    case DICKE3_METHOD_RWA: return Method::rwa;
    case DICKE3_METHOD_ZEROTH: return Method::zeroth;
    case DICKE3_METHOD_GRWA: return Method::grwa;
    }
    fail(ErrorCode::invalid_argument, "unknown method id " + std::to_string(static_cast<int>(m)));
}

ModelParams to_params(const dicke3_params* p) {
    require(p != nullptr, "params must not be null");
    ModelParams mp{p->delta, p->omega, p->g};
    mp.validate();
    return mp;
}

FockSpace to_fock(int n_max) {
    if (n_max < 3) fail(ErrorCode::invalid_argument, "n_max must be at least 3 (got " + std::to_string(n_max) + ")");
    return FockSpace{n_max};
}

CMatrix read_complex(const double* data, int dim) {
    require(data != nullptr, "matrix pointer must not be null");
    CMatrix m(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = cplx(data[2 * (r * dim + c)], data[2 * (r * dim + c) + 1]);
    return m;
}

void write_complex(const CMatrix& m, double* out) {
    const int dim = static_cast<int>(m.rows());
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
            out[2 * (r * dim + c)] = m(r, c).real();
            out[2 * (r * dim + c) + 1] = m(r, c).imag();
        }
}

DensityMatrix read_qubit_state(const double* rho8) {
    return DensityMatrix(read_complex(rho8, qubit_dim), DensityBasis::qubits);
}

} // namespace

extern "C" {

const char* dicke3_version(void) { return "1.0.0"; }

const char* dicke3_last_error(void) { return last_error.c_str(); }

const char* dicke3_status_name(dicke3_status status) {
    switch (status) {
    case DICKE3_OK: return "ok";
    case DICKE3_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DICKE3_ERR_INVALID_STATE: return "invalid state";
    case DICKE3_ERR_SOLVER: return "solver failure";
    case DICKE3_ERR_IO: return "i/o error";
    case DICKE3_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* dicke3_method_name(dicke3_method method) {
    switch (method) {
    case DICKE3_METHOD_EXACT: return "exact";
    case DICKE3_METHOD_RWA: return "rwa";
    case DICKE3_METHOD_ZEROTH: return "zeroth";
    case DICKE3_METHOD_GRWA: return "grwa";
    }
    return "unknown";
}

dicke3_status dicke3_method_parse(const char* name, dicke3_method* out) {
    return guarded([&] {
        require(name != nullptr && out != nullptr, "null argument");
        switch (method_from_string(name)) {
        case Method::exact: *out = DICKE3_METHOD_EXACT; break;
        case Method::rwa: *out = DICKE3_METHOD_RWA; break;
        case Method::zeroth: *out = DICKE3_METHOD_ZEROTH; break;
        case Method::grwa: *out = DICKE3_METHOD_GRWA; break;
        }
    });
}

dicke3_status dicke3_eigensystem_solve(dicke3_method method, const dicke3_params* params, int n_max,
                                       dicke3_eigensystem** out) {
    return guarded([&] {
        require(out != nullptr, "output handle must not be null");
        *out = nullptr;
        auto* h = new dicke3_eigensystem{solve(to_method(method), to_params(params), to_fock(n_max))};
        *out = h;
    });
}

void dicke3_eigensystem_free(dicke3_eigensystem* eig) { delete eig; }

int dicke3_eigensystem_size(const dicke3_eigensystem* eig) { return eig ? eig->sys.size() : 0; }

dicke3_status dicke3_eigensystem_energies(const dicke3_eigensystem* eig, double* out, size_t capacity) {
    return guarded([&] {
        require(eig != nullptr && out != nullptr, "null argument");
        require(capacity >= static_cast<size_t>(eig->sys.size()), "output buffer too small");
        for (int i = 0; i < eig->sys.size(); ++i) out[i] = eig->sys.energies(i);
    });
}

dicke3_status dicke3_eigensystem_vector(const dicke3_eigensystem* eig, int level, double* out, size_t capacity) {
    return guarded([&] {
        require(eig != nullptr && out != nullptr, "null argument");
        require(level >= 0 && level < eig->sys.size(), "level index out of range");
        const auto d = static_cast<size_t>(eig->sys.vectors.rows());
        require(capacity >= 2 * d, "output buffer too small");
        for (size_t i = 0; i < d; ++i) {
            out[2 * i] = eig->sys.vectors(i, level).real();
            out[2 * i + 1] = eig->sys.vectors(i, level).imag();
        }
    });
}

dicke3_status dicke3_energies(dicke3_method method, const dicke3_params* params, int n_max, double* out, size_t count) {
    return guarded([&] {
        require(out != nullptr, "null output buffer");
        const FockSpace fock = to_fock(n_max);
        require(count <= static_cast<size_t>(fock.composite_dim()), "count exceeds the space dimension");
        const RVector e = solve_energies(to_method(method), to_params(params), fock);
        for (size_t i = 0; i < count; ++i) out[i] = e(static_cast<Eigen::Index>(i));
    });
}

dicke3_status dicke3_level_sweep(const dicke3_method* methods, size_t n_methods, const dicke3_params* params,
                                 const double* g_values, size_t n_g, int k_levels, int n_max, unsigned threads,
                                 double* out, int* point_ok) {
    return guarded([&] {
        require(methods != nullptr && n_methods > 0, "at least one method is required");
        require(g_values != nullptr && n_g > 0, "g grid is empty");
        require(out != nullptr, "null output buffer");
        std::vector<Method> ms;
        for (size_t i = 0; i < n_methods; ++i) ms.push_back(to_method(methods[i]));
        const ModelParams tmpl = to_params(params);
        const LevelTable table =
            level_sweep(ms, tmpl, std::vector<double>(g_values, g_values + n_g), k_levels, to_fock(n_max), threads);
        std::string failures;
        for (size_t gi = 0; gi < n_g; ++gi) {
            const bool ok = table.failures[gi].empty();
            if (point_ok) point_ok[gi] = ok ? 1 : 0;
            if (!ok) failures += (failures.empty() ? "" : "\n") + table.failures[gi];
            for (size_t mi = 0; mi < n_methods; ++mi) {
                const auto it = std::find(table.methods.begin(), table.methods.end(), ms[mi]);
                const auto col = static_cast<std::size_t>(it - table.methods.begin());
                for (int l = 0; l < k_levels; ++l)
                    out[(gi * n_methods + mi) * k_levels + l] =
                        ok ? table.at(gi, col, l) : std::numeric_limits<double>::quiet_NaN();
            }
        }
        if (!failures.empty()) fail(ErrorCode::solver_failure, failures);
    });
}

void dicke3_dynamics_options_default(dicke3_dynamics_options* options) {
    if (!options) return;
    const TrajectoryOptions d;
    options->tmax_scaled = d.tmax_scaled;
    options->steps = d.steps;
    options->gme_stride = d.gme_stride;
    options->compute_gme = d.compute_gme ? 1 : 0;
    options->sdp_tol = d.sdp.tol;
    options->sdp_max_iter = d.sdp.max_iter;
    options->threads = d.threads;
}

dicke3_status dicke3_dynamics_run(dicke3_method method, const dicke3_params* params, int n_max,
                                  const dicke3_dynamics_options* options, dicke3_trajectory** out) {
    return guarded([&] {
        require(out != nullptr, "output handle must not be null");
        *out = nullptr;
        dicke3_dynamics_options o;
        dicke3_dynamics_options_default(&o);
        if (options) o = *options;
        TrajectoryOptions to;
        to.tmax_scaled = o.tmax_scaled;
        to.steps = o.steps;
        to.gme_stride = o.gme_stride;
        to.compute_gme = o.compute_gme != 0;
        to.sdp.tol = o.sdp_tol;
        to.sdp.max_iter = o.sdp_max_iter;
        to.threads = o.threads;
        const EigenSystem eig = solve(to_method(method), to_params(params), to_fock(n_max));
        *out = new dicke3_trajectory{run_trajectory(eig, to)};
    });
}

void dicke3_trajectory_free(dicke3_trajectory* traj) { delete traj; }

int dicke3_trajectory_size(const dicke3_trajectory* traj) { return traj ? traj->traj.size() : 0; }

dicke3_status dicke3_trajectory_sample(const dicke3_trajectory* traj, int index, dicke3_sample* out) {
    return guarded([&] {
        require(traj != nullptr && out != nullptr, "null argument");
        const Trajectory& t = traj->traj;
        require(index >= 0 && index < t.size(), "sample index out of range");
        out->t_scaled = t.times[index];
        out->concurrence = t.concurrence[index];
        out->negativity_ab_c = t.negativity_ab_c[index];
        out->gme = t.gme[index];
        out->gme_computed = t.gme_computed[index] ? 1 : 0;
        for (int k = 0; k < 4; ++k) out->populations[k] = t.populations[index][k];
    });
}

dicke3_status dicke3_trajectory_state(const dicke3_trajectory* traj, int index, double* rho8) {
    return guarded([&] {
        require(traj != nullptr && rho8 != nullptr, "null argument");
        require(index >= 0 && index < traj->traj.size(), "sample index out of range");
        write_complex(traj->traj.states[index].matrix(), rho8);
    });
}

dicke3_status dicke3_density_validate(const double* rho, int dim) {
    return guarded([&] {
        require(dim == spin_dim || dim == qubit_dim, "density matrix dimension must be 4 or 8");
        const std::string why = density_violation(read_complex(rho, dim));
        if (!why.empty()) fail(ErrorCode::invalid_state, "invalid density matrix: " + why);
    });
}

dicke3_status dicke3_gme(const double* rho8, double tol, int max_iter, dicke3_gme_result* out, double* witness) {
    return guarded([&] {
        require(out != nullptr, "null result pointer");
        SdpOptions opt;
        opt.tol = tol;
        opt.max_iter = max_iter;
        const WitnessResult res = gme(read_qubit_state(rho8), opt);
        out->value = res.value;
        out->optimum = res.optimum;
        out->relative_gap = res.relative_gap;
        out->iterations = res.iterations;
        if (witness) write_complex(res.witness, witness);
    });
}

dicke3_status dicke3_negativity(const double* rho8, unsigned part, double* out) {
    return guarded([&] {
        require(out != nullptr, "null output pointer");
        *out = negativity(read_qubit_state(rho8), part);
    });
}

dicke3_status dicke3_concurrence(const double* rho8, double* out) {
    return guarded([&] {
        require(out != nullptr, "null output pointer");
        *out = concurrence_collective(symmetric_restrict(read_qubit_state(rho8)));
    });
}

} // extern "C"
