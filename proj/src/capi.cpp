#include "iopeg/iopeg.h"

#include <cstring>
#include <sstream>

#include "study.hpp"

struct iopeg_mesh {
  iopeg::TriMesh mesh;
};

struct iopeg_run {
  iopeg::RunResult result;
};

struct iopeg_study {
  std::vector<iopeg::StudyRow> rows;
};

namespace {

thread_local std::string g_last_error;

iopeg_status fail(iopeg_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

/// Runs `body`, translating exceptions into status codes.
template <typename F>
iopeg_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return IOPEG_OK;
  } catch (const iopeg::Error& e) {
    return fail(static_cast<iopeg_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(IOPEG_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(IOPEG_INTERNAL, e.what());
  }
}

iopeg_status null_arg(const char* what) {
  return fail(IOPEG_INVALID_ARGUMENT, std::string("null argument: ") + what);
}

iopeg::PrecondMode to_mode(iopeg_precond p) {
  switch (p) {
    case IOPEG_PRECOND_EXACT_BLOCK: return iopeg::PrecondMode::ExactBlock;
    case IOPEG_PRECOND_JACOBI: return iopeg::PrecondMode::JacobiBlock;
    case IOPEG_PRECOND_NONE: return iopeg::PrecondMode::None;
  }
  throw iopeg::Error(iopeg::ErrorCode::InvalidArgument, "unknown preconditioner");
}

iopeg::RunConfig to_run_config(const iopeg_run_config& c) {
  iopeg::RunConfig r;
  r.n = c.n;
  r.k = c.k;
  r.kappa0 = c.kappa0;
  r.penalty = iopeg::PenaltyParams(c.gamma_int, c.gamma_bdy, c.alpha);
  r.tol = c.tol;
  r.max_iters = c.max_iters;
  r.precond = to_mode(c.precond);
  return r;
}

iopeg_status copy_out(const double* src, std::size_t n, double* buffer, std::size_t capacity,
                      std::size_t* length) {
  if (!length) return null_arg("length");
  *length = n;
  if (buffer) std::memcpy(buffer, src, std::min(n, capacity) * sizeof(double));
  return IOPEG_OK;
}

}  // namespace

extern "C" {

const char* iopeg_last_error(void) { return g_last_error.c_str(); }

const char* iopeg_version(void) { return "1.0.0"; }

const char* iopeg_status_string(iopeg_status s) {
  switch (s) {
    case IOPEG_OK: return "ok";
    case IOPEG_INVALID_ARGUMENT: return "invalid argument";
    case IOPEG_DEGENERATE_CELL: return "degenerate cell";
    case IOPEG_NOT_SPD: return "matrix not positive definite";
    case IOPEG_NOT_SYMMETRIC: return "matrix not symmetric";
    case IOPEG_DIMENSION_MISMATCH: return "dimension mismatch";
    case IOPEG_BREAKDOWN: return "solver breakdown";
    case IOPEG_NOT_CONVERGED: return "not converged";
    case IOPEG_IO: return "i/o error";
    case IOPEG_INTERNAL: return "internal error";
  }
  return "unknown status";
}

iopeg_status iopeg_mesh_create(int64_t n, iopeg_mesh** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new iopeg_mesh{iopeg::build_structured_mesh(n)}; });
}

void iopeg_mesh_destroy(iopeg_mesh* mesh) { delete mesh; }

iopeg_status iopeg_mesh_counts(const iopeg_mesh* mesh, int64_t* vertices, int64_t* cells,
                               int64_t* facets, int64_t* boundary_facets) {
  if (!mesh) return null_arg("mesh");
  if (vertices) *vertices = mesh->mesh.num_vertices();
  if (cells) *cells = mesh->mesh.num_cells();
  if (facets) *facets = mesh->mesh.num_facets();
  if (boundary_facets) *boundary_facets = mesh->mesh.num_boundary_facets();
  return IOPEG_OK;
}

iopeg_status iopeg_mesh_h_max(const iopeg_mesh* mesh, double* h_max) {
  if (!mesh) return null_arg("mesh");
  if (!h_max) return null_arg("h_max");
  *h_max = mesh->mesh.h_max();
  return IOPEG_OK;
}

void iopeg_run_config_default(iopeg_run_config* c) {
  if (!c) return;
  c->n = 8;
  c->k = 1;
  c->kappa0 = 1.0;
  c->gamma_int = 10.0;
  c->gamma_bdy = 10.0;
  c->alpha = 1.0;
  c->tol = 1e-12;
  c->max_iters = 10000;
  c->precond = IOPEG_PRECOND_EXACT_BLOCK;
}

iopeg_status iopeg_run_solve(const iopeg_run_config* config, iopeg_run** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new iopeg_run{iopeg::run_single(to_run_config(*config))}; });
}

void iopeg_run_destroy(iopeg_run* run) { delete run; }

iopeg_status iopeg_run_errors(const iopeg_run* run, iopeg_error_report* out) {
  if (!run) return null_arg("run");
  if (!out) return null_arg("out");
  const auto& e = run->result.errors;
  *out = {e.l2_error, e.ah_error, e.flux_error, e.conservation_residual,
          e.interior_jump_seminorm};
  return IOPEG_OK;
}

iopeg_status iopeg_run_solve_info(const iopeg_run* run, int64_t* iterations, int* converged,
                                  double* relative_residual) {
  if (!run) return null_arg("run");
  const auto& s = run->result.solve;
  if (iterations) *iterations = s.iterations;
  if (converged) *converged = s.converged ? 1 : 0;
  if (relative_residual) *relative_residual = s.final_relative_residual;
  return IOPEG_OK;
}

iopeg_status iopeg_run_solution(const iopeg_run* run, double* buffer, size_t capacity,
                                size_t* length) {
  if (!run) return null_arg("run");
  const auto& c = run->result.solution.coeffs;
  return copy_out(c.data(), c.size(), buffer, capacity, length);
}

iopeg_status iopeg_run_residual_history(const iopeg_run* run, double* buffer, size_t capacity,
                                        size_t* length) {
  if (!run) return null_arg("run");
  const auto& h = run->result.solve.residual_history;
  return copy_out(h.data(), h.size(), buffer, capacity, length);
}

iopeg_status iopeg_spectral_bounds(const iopeg_run_config* config, iopeg_eigen_method method,
                                   double* lambda_min, double* lambda_max) {
  if (!config) return null_arg("config");
  if (!lambda_min || !lambda_max) return null_arg("lambda");
  return guarded([&] {
    using namespace iopeg;
    const RunConfig rc = to_run_config(*config);
    require(rc.k == 1 || rc.k == 2, ErrorCode::InvalidArgument, "k must be 1 or 2");
    const ModelProblem problem = ManufacturedSolution{rc.kappa0}.problem();
    const TriMesh mesh = apply_boundary(build_structured_mesh(rc.n), problem);
    const EGSpace space(mesh, rc.k);
    const auto A = assemble_matrix(mesh, space, problem, rc.penalty);
    const auto At =
        block_diagonal(assemble_block(mesh, space, problem, rc.penalty, Block::Continuous),
                       assemble_block(mesh, space, problem, rc.penalty, Block::Constant));
    SpectralOptions opt;
    opt.method = method == IOPEG_EIGEN_DENSE     ? EigenMethod::Dense
                 : method == IOPEG_EIGEN_LANCZOS ? EigenMethod::Lanczos
                                                 : EigenMethod::Auto;
    const auto b = spectral_equivalence(A, At, space.kernel_vector(), opt);
    *lambda_min = b.lambda_min;
    *lambda_max = b.lambda_max;
  });
}

void iopeg_study_config_default(iopeg_study_config* c) {
  if (!c) return;
  const iopeg::StudyConfig d;
  c->study = IOPEG_STUDY_CONVERGENCE;
  c->n_list = nullptr;
  c->n_count = 0;
  c->k = d.k;
  c->alpha = d.alpha;
  c->gamma_int = d.gamma_int;
  c->gamma_bdy = d.gamma_bdy;
  c->kappa0_list = nullptr;
  c->kappa0_count = 0;
  c->alpha_list = nullptr;
  c->alpha_count = 0;
  c->tol = d.tol;
  c->max_iters = d.max_iters;
  c->precond = IOPEG_PRECOND_EXACT_BLOCK;
}

iopeg_status iopeg_study_run(const iopeg_study_config* config, iopeg_study** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    using namespace iopeg;
    StudyConfig c;
    switch (config->study) {
      case IOPEG_STUDY_CONVERGENCE: c.study = StudyKind::Convergence; break;
      case IOPEG_STUDY_PRECOND: c.study = StudyKind::Precond; break;
      case IOPEG_STUDY_GAMMA_SWEEP: c.study = StudyKind::GammaSweep; break;
      case IOPEG_STUDY_ALPHA_SWEEP: c.study = StudyKind::AlphaSweep; break;
      case IOPEG_STUDY_SINGLE: c.study = StudyKind::Single; break;
      default: throw Error(ErrorCode::InvalidArgument, "unknown study kind");
    }
    if (config->n_list) c.n_list.assign(config->n_list, config->n_list + config->n_count);
    if (config->kappa0_list)
      c.kappa0_list.assign(config->kappa0_list, config->kappa0_list + config->kappa0_count);
    if (config->alpha_list)
      c.alpha_list.assign(config->alpha_list, config->alpha_list + config->alpha_count);
    c.k = config->k;
    c.alpha = config->alpha;
    c.gamma_int = config->gamma_int;
    c.gamma_bdy = config->gamma_bdy;
    c.tol = config->tol;
    c.max_iters = config->max_iters;
    c.precond = to_mode(config->precond);
    *out = new iopeg_study{run_study(c)};
  });
}

iopeg_status iopeg_study_read_csv(const char* path, iopeg_study** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new iopeg_study{iopeg::parse_csv(path)}; });
}

void iopeg_study_destroy(iopeg_study* study) { delete study; }

size_t iopeg_study_row_count(const iopeg_study* study) { return study ? study->rows.size() : 0; }

iopeg_status iopeg_study_row_at(const iopeg_study* study, size_t index, iopeg_study_row* out) {
  if (!study) return null_arg("study");
  if (!out) return null_arg("out");
  if (index >= study->rows.size()) return fail(IOPEG_INVALID_ARGUMENT, "row index out of range");
  const auto& r = study->rows[index];
  *out = {};
  out->kappa0 = r.kappa0;
  out->k = r.k;
  out->n = r.n;
  out->h_max = r.h_max;
  out->l2_error = r.l2_error;
  out->ah_error = r.ah_error;
  out->flux_error = r.flux_error;
  out->has_rates = r.l2_rate.has_value() ? 1 : 0;
  out->l2_rate = r.l2_rate.value_or(0.0);
  out->ah_rate = r.ah_rate.value_or(0.0);
  out->flux_rate = r.flux_rate.value_or(0.0);
  out->cons_residual = r.cons_residual;
  out->iterations = r.iterations;
  out->converged = r.converged ? 1 : 0;
  out->alpha = r.alpha;
  out->gamma_int = r.gamma_int;
  out->gamma_bdy = r.gamma_bdy;
  return IOPEG_OK;
}

iopeg_status iopeg_study_write_csv(const iopeg_study* study, const char* path) {
  if (!study) return null_arg("study");
  if (!path) return null_arg("path");
  return guarded([&] { iopeg::emit_csv(study->rows, path); });
}

iopeg_status iopeg_study_format_table(const iopeg_study* study, char* buffer, size_t capacity,
                                      size_t* length) {
  if (!study) return null_arg("study");
  if (!length) return null_arg("length");
  return guarded([&] {
    std::ostringstream os;
    iopeg::print_table(study->rows, os);
    const std::string s = os.str();
    *length = s.size() + 1;
    if (buffer && capacity > 0) {
      const std::size_t n = std::min(capacity - 1, s.size());
      std::memcpy(buffer, s.data(), n);
      buffer[n] = '\0';
    }
  });
}

iopeg_status iopeg_parse_study_kind(const char* name, iopeg_study_kind* out) {
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  const auto k = iopeg::parse_study(name);
  if (!k) return fail(IOPEG_INVALID_ARGUMENT, std::string("unknown study '") + name + "'");
  *out = static_cast<iopeg_study_kind>(static_cast<int>(*k));
  return IOPEG_OK;
}

iopeg_status iopeg_parse_precond(const char* name, iopeg_precond* out) {
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  const auto m = iopeg::parse_precond(name);
  if (!m) return fail(IOPEG_INVALID_ARGUMENT, std::string("unknown preconditioner '") + name + "'");
  *out = static_cast<iopeg_precond>(static_cast<int>(*m));
  return IOPEG_OK;
}

}  // extern "C"
