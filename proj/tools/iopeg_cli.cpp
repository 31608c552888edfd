// Experiment driver for the interior over-penalized enriched Galerkin solver.

#include <CLI11.hpp>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "iopeg/iopeg.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitNotConservative = 3;
constexpr int kExitRuntime = 4;
constexpr double kConservationLimit = 1e-8;

struct StudyHandle {
  iopeg_study* p = nullptr;
  ~StudyHandle() { iopeg_study_destroy(p); }
};

int runtime_failure(iopeg_status s) {
  std::fprintf(stderr, "error: %s (%s)\n", iopeg_last_error(), iopeg_status_string(s));
  return s == IOPEG_INVALID_ARGUMENT ? kExitUsage : kExitRuntime;
}

void print_iteration_spread(const iopeg_study* study) {
  std::map<std::pair<double, double>, std::pair<int64_t, int64_t>> span;  // (alpha, kappa0) -> min/max
  const size_t rows = iopeg_study_row_count(study);
  for (size_t i = 0; i < rows; ++i) {
    iopeg_study_row r;
    iopeg_study_row_at(study, i, &r);
    auto [it, fresh] = span.try_emplace({r.alpha, r.kappa0}, r.iterations, r.iterations);
    if (!fresh) {
      it->second.first = std::min(it->second.first, r.iterations);
      it->second.second = std::max(it->second.second, r.iterations);
    }
  }
  std::printf("\niteration spread (max/min over n):\n");
  for (const auto& [key, mm] : span)
    std::printf("  alpha=%g kappa0=%g: %lld..%lld  ratio %.2f\n", key.first, key.second,
                static_cast<long long>(mm.first), static_cast<long long>(mm.second),
                static_cast<double>(mm.second) / static_cast<double>(std::max<int64_t>(mm.first, 1)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interior over-penalized enriched Galerkin: convergence and solver studies"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence");

  std::string study_name = "convergence", precond_name = "exact-block", out;
  std::vector<int64_t> n_list;
  std::vector<double> kappa0_list, alpha_list;
  int k = 1;
  double alpha = 1.0, gamma = 10.0, gamma_int = 10.0, gamma_bdy = 10.0, tol = 1e-12;
  int64_t max_iters = 10000;

  app.add_option("--study", study_name, "convergence | precond | gamma-sweep | alpha-sweep | single")
      ->check(CLI::IsMember({"convergence", "precond", "gamma-sweep", "alpha-sweep", "single"}));
  auto* n_opt = app.add_option("--n", n_list, "subdivision counts, ascending")->delimiter(',');
  app.add_option("--k", k, "polynomial degree of the continuous part")->check(CLI::IsMember({1, 2}));
  auto* alpha_opt = app.add_option("--alpha", alpha, "interior over-penalization exponent");
  auto* alpha_list_opt =
      app.add_option("--alpha-list", alpha_list, "alpha values for alpha-sweep")->delimiter(',');
  auto* gamma_opt = app.add_option("--gamma", gamma, "penalty on all facets");
  auto* gi_opt = app.add_option("--gamma-int", gamma_int, "penalty on interior facets");
  auto* gb_opt = app.add_option("--gamma-bdy", gamma_bdy, "penalty on Dirichlet facets");
  auto* kappa_opt =
      app.add_option("--kappa0", kappa0_list, "x-diffusivity values")->delimiter(',');
  app.add_option("--tol", tol, "MINRES relative tolerance");
  app.add_option("--max-iters", max_iters, "MINRES iteration cap");
  app.add_option("--precond", precond_name, "exact-block | jacobi | none")
      ->check(CLI::IsMember({"exact-block", "jacobi", "none"}));
  app.add_option("--out", out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  iopeg_study_kind kind;
  iopeg_precond precond;
  if (iopeg_parse_study_kind(study_name.c_str(), &kind) != IOPEG_OK ||
      iopeg_parse_precond(precond_name.c_str(), &precond) != IOPEG_OK) {
    std::fprintf(stderr, "error: %s\n", iopeg_last_error());
    return kExitUsage;
  }

  const bool iteration_study = kind == IOPEG_STUDY_PRECOND || kind == IOPEG_STUDY_GAMMA_SWEEP ||
                               kind == IOPEG_STUDY_ALPHA_SWEEP;
  if (n_opt->count() == 0)
    n_list = iteration_study ? std::vector<int64_t>{8, 16, 32, 64, 128}
                             : std::vector<int64_t>{4, 8, 16, 32, 64, 128};
  if (kappa_opt->count() == 0)
    kappa0_list = iteration_study ? std::vector<double>{1, 2, 4, 8, 10}
                                  : std::vector<double>{1, 10};
  if (kind == IOPEG_STUDY_SINGLE) {
    n_list.resize(1);
    kappa0_list.resize(1);
  }

  // Over-penalization study: alpha = 0 with a strong interior penalty.
  if (kind == IOPEG_STUDY_GAMMA_SWEEP) {
    if (alpha_opt->count() == 0) alpha = 0.0;
    if (gi_opt->count() == 0 && gamma_opt->count() == 0) gamma_int = 200.0;
  }
  if (gamma_opt->count() > 0) {
    if (gi_opt->count() == 0) gamma_int = gamma;
    if (gb_opt->count() == 0) gamma_bdy = gamma;
  }
  if (alpha_list_opt->count() == 0) alpha_list = {0.0, 0.5, 0.9, 1.0, 2.0};

  iopeg_study_config cfg;
  iopeg_study_config_default(&cfg);
  cfg.study = kind;
  cfg.n_list = n_list.data();
  cfg.n_count = n_list.size();
  cfg.k = k;
  cfg.alpha = alpha;
  cfg.gamma_int = gamma_int;
  cfg.gamma_bdy = gamma_bdy;
  cfg.kappa0_list = kappa0_list.data();
  cfg.kappa0_count = kappa0_list.size();
  cfg.alpha_list = alpha_list.data();
  cfg.alpha_count = alpha_list.size();
  cfg.tol = tol;
  cfg.max_iters = max_iters;
  cfg.precond = precond;

  StudyHandle study;
  if (const auto s = iopeg_study_run(&cfg, &study.p); s != IOPEG_OK) return runtime_failure(s);

  size_t len = 0;
  iopeg_study_format_table(study.p, nullptr, 0, &len);
  std::string table(len, '\0');
  iopeg_study_format_table(study.p, table.data(), table.size(), &len);
  std::fputs(table.c_str(), stdout);
  if (iteration_study) print_iteration_spread(study.p);

  if (!out.empty()) {
    if (const auto s = iopeg_study_write_csv(study.p, out.c_str()); s != IOPEG_OK)
      return runtime_failure(s);
  }

  if (kind == IOPEG_STUDY_SINGLE) {
    iopeg_study_row row;
    iopeg_study_row_at(study.p, 0, &row);
    if (!row.converged) {
      std::fprintf(stderr, "MINRES did not converge within %lld iterations\n",
                   static_cast<long long>(max_iters));
      return kExitNotConverged;
    }
    if (!(row.cons_residual <= kConservationLimit)) {
      std::fprintf(stderr, "conservation residual %.3e exceeds %.0e\n", row.cons_residual,
                   kConservationLimit);
      return kExitNotConservative;
    }
  }
  return 0;
}
