#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "postprocess.hpp"
#include "solver.hpp"

namespace iopeg {

/// One manufactured-solution solve.
struct RunConfig {
  Index n = 8;
  int k = 1;
  double kappa0 = 1.0;
  PenaltyParams penalty{};
  double tol = 1e-12;
  Index max_iters = 10000;
  PrecondMode precond = PrecondMode::ExactBlock;
  AssemblyOptions assembly{};
  /// Finish with one exact solve on the constant block so the cell
  /// balances hold to rounding rather than to the MINRES tolerance.
  bool p0_correction = true;
};

struct RunResult {
  Index n = 0;
  double h_max = 0.0;
  Index ndofs = 0;
  ErrorReport errors;
  SolveReport solve;
  EGFunction solution;
};

/// mesh -> assemble -> precondition -> MINRES -> flux -> errors.
RunResult run_single(const RunConfig& config);

enum class StudyKind { Convergence, Precond, GammaSweep, AlphaSweep, Single };

struct StudyConfig {
  StudyKind study = StudyKind::Convergence;
  std::vector<Index> n_list{4, 8, 16, 32, 64, 128};
  int k = 1;
  double alpha = 1.0;
  double gamma_int = 10.0;
  double gamma_bdy = 10.0;
  std::vector<double> kappa0_list{1.0};
  /// Alpha values visited by the alpha sweep.
  std::vector<double> alpha_list{0.0, 0.5, 0.9, 1.0, 2.0};
  double tol = 1e-12;
  Index max_iters = 10000;
  PrecondMode precond = PrecondMode::ExactBlock;
  std::string out;

  void validate() const;
};

struct StudyRow {
  double kappa0 = 1.0;
  int k = 1;
  Index n = 0;
  double h_max = 0.0;
  double l2_error = 0.0;
  std::optional<double> l2_rate;
  double ah_error = 0.0;
  std::optional<double> ah_rate;
  double flux_error = 0.0;
  std::optional<double> flux_rate;
  double cons_residual = 0.0;
  Index iterations = 0;
  bool converged = false;
  double alpha = 1.0;
  double gamma_int = 10.0;
  double gamma_bdy = 10.0;

  bool operator==(const StudyRow&) const = default;
};

/// Sweeps kappa0 x n with the config's penalty and fills in log2 rates
/// between consecutive n of each kappa0 block.
std::vector<StudyRow> run_convergence_study(const StudyConfig& config);
/// Same sweep as the convergence study; rows are read for iteration counts.
std::vector<StudyRow> run_precond_study(const StudyConfig& config);
/// alpha = 0 with separate interior/boundary gamma (defaults 200 / 10 are
/// applied by the caller).
std::vector<StudyRow> run_gamma_sweep(const StudyConfig& config);
/// One precond sweep per entry of alpha_list.
std::vector<StudyRow> run_alpha_sweep(const StudyConfig& config);
/// First n and kappa0 only.
StudyRow run_single_row(const StudyConfig& config);

std::vector<StudyRow> run_study(const StudyConfig& config);

/// Largest over smallest iteration count per kappa0 block.
double iteration_spread(const std::vector<StudyRow>& rows, double kappa0);

void write_csv(const std::vector<StudyRow>& rows, std::ostream& os);
void emit_csv(const std::vector<StudyRow>& rows, const std::string& path);
std::vector<StudyRow> read_csv(std::istream& is);
std::vector<StudyRow> parse_csv(const std::string& path);

/// Fixed-width table with rates to two decimals.
void print_table(const std::vector<StudyRow>& rows, std::ostream& os);

const char* study_name(StudyKind kind);
std::optional<StudyKind> parse_study(const std::string& name);
const char* precond_name(PrecondMode mode);
std::optional<PrecondMode> parse_precond(const std::string& name);

}  // namespace iopeg
