#include "study.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace iopeg {

namespace {

/// Moves x along the kernel so the constant part has zero mean. The
/// represented function is unchanged.
void center_constants(const EGSpace& space, std::vector<double>& x) {
  const auto off = static_cast<std::size_t>(space.const_offset());
  double mean = 0.0;
  for (std::size_t i = off; i < x.size(); ++i) mean += x[i];
  mean /= static_cast<double>(x.size() - off);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += i < off ? mean : -mean;
}

}  // namespace

RunResult run_single(const RunConfig& cfg) {
  require(cfg.k == 1 || cfg.k == 2, ErrorCode::InvalidArgument, "k must be 1 or 2");
  require(cfg.n >= 1, ErrorCode::InvalidArgument, "n must be positive");
  const ManufacturedSolution ms{cfg.kappa0};
  const ModelProblem problem = ms.problem();
  const TriMesh mesh = apply_boundary(build_structured_mesh(cfg.n), problem);
  const EGSpace space(mesh, cfg.k);

  const auto A = assemble_matrix(mesh, space, problem, cfg.penalty, Block::Full, cfg.assembly);
  auto b = assemble_rhs(mesh, space, problem, cfg.penalty, cfg.assembly);
  const auto kernel = space.kernel_vector();
  project_out(b, kernel);

  const auto m_c =
      assemble_block(mesh, space, problem, cfg.penalty, Block::Continuous, cfg.assembly);
  const auto m_0 = assemble_block(mesh, space, problem, cfg.penalty, Block::Constant, cfg.assembly);
  const BlockPreconditioner P = cfg.precond == PrecondMode::None
                                    ? BlockPreconditioner(space.total_ndofs())
                                    : BlockPreconditioner(m_c, m_0, cfg.precond);

  RunResult r;
  r.n = cfg.n;
  r.h_max = mesh.h_max();
  r.ndofs = space.total_ndofs();
  MinresOptions mo;
  mo.tol = cfg.tol;
  mo.max_iters = cfg.max_iters;
  mo.kernel = kernel;
  r.solution.coeffs = minres(A, b, P, r.solve, mo);
  center_constants(space, r.solution.coeffs);
  if (cfg.p0_correction)
    block_correction(A, b, r.solution.coeffs, space.const_offset(), factorize_spd(m_0));

  const auto flux = recover_flux(space, mesh, r.solution, problem, cfg.penalty, cfg.assembly);
  r.errors = error_norms(
      space, mesh, r.solution, [&ms](const Vec2& x) { return ms.u(x); },
      [&ms](const Vec2& x) { return ms.grad(x); }, problem, cfg.penalty, &flux, cfg.assembly);
  return r;
}

void StudyConfig::validate() const {
  require(!n_list.empty(), ErrorCode::InvalidArgument, "n list is empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    require(n_list[i] >= 1, ErrorCode::InvalidArgument, "n values must be positive");
    require(i == 0 || n_list[i] > n_list[i - 1], ErrorCode::InvalidArgument,
            "n list must be strictly ascending");
  }
  require(k == 1 || k == 2, ErrorCode::InvalidArgument, "k must be 1 or 2");
  require(tol > 0.0 && tol < 1.0, ErrorCode::InvalidArgument, "tol must lie in (0, 1)");
  require(max_iters >= 1, ErrorCode::InvalidArgument, "max iterations must be positive");
  require(!kappa0_list.empty(), ErrorCode::InvalidArgument, "kappa0 list is empty");
  for (double kp : kappa0_list)
    require(kp > 0.0, ErrorCode::InvalidArgument, "kappa0 values must be positive");
  PenaltyParams(gamma_int, gamma_bdy, alpha).validate();
  if (study == StudyKind::AlphaSweep) {
    require(!alpha_list.empty(), ErrorCode::InvalidArgument, "alpha list is empty");
    for (double a : alpha_list)
      require(a >= 0.0, ErrorCode::InvalidArgument, "alpha values must be nonnegative");
  }
}

namespace {

std::optional<double> rate(double e_prev, double e_cur, double h_prev, double h_cur) {
  if (!(e_prev > 0.0) || !(e_cur > 0.0)) return std::nullopt;
  return std::log(e_prev / e_cur) / std::log(h_prev / h_cur);
}

std::vector<StudyRow> sweep(const StudyConfig& c, double alpha) {
  c.validate();
  std::vector<StudyRow> rows;
  for (double kappa0 : c.kappa0_list) {
    for (std::size_t i = 0; i < c.n_list.size(); ++i) {
      RunConfig rc;
      rc.n = c.n_list[i];
      rc.k = c.k;
      rc.kappa0 = kappa0;
      rc.penalty = PenaltyParams(c.gamma_int, c.gamma_bdy, alpha);
      rc.tol = c.tol;
      rc.max_iters = c.max_iters;
      rc.precond = c.precond;
      const RunResult r = run_single(rc);

      StudyRow row;
      row.kappa0 = kappa0;
      row.k = c.k;
      row.n = r.n;
      row.h_max = r.h_max;
      row.l2_error = r.errors.l2_error;
      row.ah_error = r.errors.ah_error;
      row.flux_error = r.errors.flux_error;
      row.cons_residual = r.errors.conservation_residual;
      row.iterations = r.solve.iterations;
      row.converged = r.solve.converged;
      row.alpha = alpha;
      row.gamma_int = c.gamma_int;
      row.gamma_bdy = c.gamma_bdy;
      if (i > 0) {
        const StudyRow& p = rows.back();
        row.l2_rate = rate(p.l2_error, row.l2_error, p.h_max, row.h_max);
        row.ah_rate = rate(p.ah_error, row.ah_error, p.h_max, row.h_max);
        row.flux_rate = rate(p.flux_error, row.flux_error, p.h_max, row.h_max);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace

std::vector<StudyRow> run_convergence_study(const StudyConfig& c) { return sweep(c, c.alpha); }
std::vector<StudyRow> run_precond_study(const StudyConfig& c) { return sweep(c, c.alpha); }

std::vector<StudyRow> run_gamma_sweep(const StudyConfig& c) { return sweep(c, c.alpha); }

std::vector<StudyRow> run_alpha_sweep(const StudyConfig& c) {
  c.validate();
  std::vector<StudyRow> rows;
  for (double a : c.alpha_list) {
    auto part = sweep(c, a);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

StudyRow run_single_row(const StudyConfig& c) {
  StudyConfig one = c;
  one.n_list = {c.n_list.front()};
  one.kappa0_list = {c.kappa0_list.front()};
  return sweep(one, c.alpha).front();
}

std::vector<StudyRow> run_study(const StudyConfig& c) {
  switch (c.study) {
    case StudyKind::Convergence: return run_convergence_study(c);
    case StudyKind::Precond: return run_precond_study(c);
    case StudyKind::GammaSweep: return run_gamma_sweep(c);
    case StudyKind::AlphaSweep: return run_alpha_sweep(c);
    case StudyKind::Single: return {run_single_row(c)};
  }
  return {};
}

double iteration_spread(const std::vector<StudyRow>& rows, double kappa0) {
  Index lo = -1, hi = -1;
  for (const auto& r : rows) {
    if (r.kappa0 != kappa0) continue;
    lo = lo < 0 ? r.iterations : std::min(lo, r.iterations);
    hi = std::max(hi, r.iterations);
  }
  require(lo > 0, ErrorCode::InvalidArgument, "no rows for the requested kappa0");
  return static_cast<double>(hi) / static_cast<double>(lo);
}

namespace {

constexpr const char* kColumns[] = {"kappa0",     "k",         "n",          "h_max",
                                    "l2_error",   "l2_rate",   "ah_error",   "ah_rate",
                                    "flux_error", "flux_rate", "cons_residual", "iterations",
                                    "converged",  "alpha",     "gamma_int",  "gamma_bdy"};
constexpr std::size_t kNumColumns = sizeof(kColumns) / sizeof(kColumns[0]);

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string sci(const std::optional<double>& v) { return v ? sci(*v) : std::string(); }

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && !s.empty(), ErrorCode::Io, "malformed number '" + s + "'");
  return v;
}

Index to_index(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && !s.empty(), ErrorCode::Io, "malformed integer '" + s + "'");
  return static_cast<Index>(v);
}

std::optional<double> to_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return to_double(s);
}

}  // namespace

void write_csv(const std::vector<StudyRow>& rows, std::ostream& os) {
  for (std::size_t i = 0; i < kNumColumns; ++i) os << (i ? "," : "") << kColumns[i];
  os << '\n';
  for (const auto& r : rows) {
    os << sci(r.kappa0) << ',' << r.k << ',' << r.n << ',' << sci(r.h_max) << ','
       << sci(r.l2_error) << ',' << sci(r.l2_rate) << ',' << sci(r.ah_error) << ','
       << sci(r.ah_rate) << ',' << sci(r.flux_error) << ',' << sci(r.flux_rate) << ','
       << sci(r.cons_residual) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
       << sci(r.alpha) << ',' << sci(r.gamma_int) << ',' << sci(r.gamma_bdy) << '\n';
  }
}

void emit_csv(const std::vector<StudyRow>& rows, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_csv(rows, os);
  os.flush();
  require(static_cast<bool>(os), ErrorCode::Io, "failed writing '" + path + "'");
}

std::vector<StudyRow> read_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorCode::Io, "missing CSV header");
  std::string expected;
  for (std::size_t i = 0; i < kNumColumns; ++i) expected += std::string(i ? "," : "") + kColumns[i];
  require(line == expected, ErrorCode::Io, "unexpected CSV header");
  std::vector<StudyRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    require(f.size() == kNumColumns, ErrorCode::Io, "wrong number of CSV fields");
    StudyRow r;
    r.kappa0 = to_double(f[0]);
    r.k = static_cast<int>(to_index(f[1]));
    r.n = to_index(f[2]);
    r.h_max = to_double(f[3]);
    r.l2_error = to_double(f[4]);
    r.l2_rate = to_opt(f[5]);
    r.ah_error = to_double(f[6]);
    r.ah_rate = to_opt(f[7]);
    r.flux_error = to_double(f[8]);
    r.flux_rate = to_opt(f[9]);
    r.cons_residual = to_double(f[10]);
    r.iterations = to_index(f[11]);
    r.converged = to_index(f[12]) != 0;
    r.alpha = to_double(f[13]);
    r.gamma_int = to_double(f[14]);
    r.gamma_bdy = to_double(f[15]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<StudyRow> parse_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorCode::Io, "cannot open '" + path + "' for reading");
  return read_csv(is);
}

void print_table(const std::vector<StudyRow>& rows, std::ostream& os) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%7s %5s %5s %2s %5s | %10s %5s | %10s %5s | %10s %5s | %10s | %5s\n",
                "kappa0", "alpha", "g_int", "k", "n", "L2 error", "rate", "a_h error", "rate",
                "flux error", "rate", "cons", "iters");
  os << buf;
  auto r2 = [](const std::optional<double>& r) {
    char b[16];
    if (r)
      std::snprintf(b, sizeof b, "%5.2f", *r);
    else
      std::snprintf(b, sizeof b, "%5s", "-");
    return std::string(b);
  };
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%7g %5g %5g %2d %5lld | %10.4e %s | %10.4e %s | %10.4e %s | %10.3e | %5lld%s\n",
                  r.kappa0, r.alpha, r.gamma_int, r.k, static_cast<long long>(r.n), r.l2_error,
                  r2(r.l2_rate).c_str(), r.ah_error, r2(r.ah_rate).c_str(), r.flux_error,
                  r2(r.flux_rate).c_str(), r.cons_residual, static_cast<long long>(r.iterations),
                  r.converged ? "" : " (not converged)");
    os << buf;
  }
}

const char* study_name(StudyKind kind) {
  switch (kind) {
    case StudyKind::Convergence: return "convergence";
    case StudyKind::Precond: return "precond";
    case StudyKind::GammaSweep: return "gamma-sweep";
    case StudyKind::AlphaSweep: return "alpha-sweep";
    case StudyKind::Single: return "single";
  }
  return "";
}

std::optional<StudyKind> parse_study(const std::string& name) {
  for (auto k : {StudyKind::Convergence, StudyKind::Precond, StudyKind::GammaSweep,
                 StudyKind::AlphaSweep, StudyKind::Single})
    if (name == study_name(k)) return k;
  return std::nullopt;
}

const char* precond_name(PrecondMode mode) {
  switch (mode) {
    case PrecondMode::ExactBlock: return "exact-block";
    case PrecondMode::JacobiBlock: return "jacobi";
    case PrecondMode::None: return "none";
  }
  return "";
}

std::optional<PrecondMode> parse_precond(const std::string& name) {
  for (auto m : {PrecondMode::ExactBlock, PrecondMode::JacobiBlock, PrecondMode::None})
    if (name == precond_name(m)) return m;
  return std::nullopt;
}

}  // namespace iopeg
