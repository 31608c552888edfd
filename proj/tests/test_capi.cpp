// Exercises the shared library through its public C header only.

#include <gtest/gtest.h>

#include <cstdio>
#include <string>
#include <vector>

#include "iopeg/iopeg.h"

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STRNE(iopeg_version(), "");
  EXPECT_STREQ(iopeg_status_string(IOPEG_OK), "ok");
  EXPECT_STREQ(iopeg_status_string(IOPEG_NOT_CONVERGED), "not converged");
  EXPECT_STREQ(iopeg_status_string(static_cast<iopeg_status>(99)), "unknown status");
}

TEST(CApi, MeshCounts) {
  iopeg_mesh* m = nullptr;
  ASSERT_EQ(iopeg_mesh_create(4, &m), IOPEG_OK);
  int64_t v, c, f, b;
  ASSERT_EQ(iopeg_mesh_counts(m, &v, &c, &f, &b), IOPEG_OK);
  EXPECT_EQ(v, 25);
  EXPECT_EQ(c, 32);
  EXPECT_EQ(f, 56);
  EXPECT_EQ(b, 16);
  double h = 0;
  ASSERT_EQ(iopeg_mesh_h_max(m, &h), IOPEG_OK);
  EXPECT_NEAR(h, 0.35355339059327373, 1e-15);
  iopeg_mesh_destroy(m);
  iopeg_mesh_destroy(nullptr);
}

TEST(CApi, ErrorsCarryCodeAndMessage) {
  iopeg_mesh* m = nullptr;
  EXPECT_EQ(iopeg_mesh_create(0, &m), IOPEG_INVALID_ARGUMENT);
  EXPECT_EQ(m, nullptr);
  EXPECT_NE(std::string(iopeg_last_error()).find("subdivision"), std::string::npos);
  EXPECT_EQ(iopeg_mesh_create(4, nullptr), IOPEG_INVALID_ARGUMENT);
  EXPECT_EQ(iopeg_mesh_counts(nullptr, nullptr, nullptr, nullptr, nullptr), IOPEG_INVALID_ARGUMENT);
  EXPECT_EQ(iopeg_run_solve(nullptr, nullptr), IOPEG_INVALID_ARGUMENT);

  iopeg_run_config cfg;
  iopeg_run_config_default(&cfg);
  cfg.k = 3;
  iopeg_run* run = nullptr;
  EXPECT_EQ(iopeg_run_solve(&cfg, &run), IOPEG_INVALID_ARGUMENT);
  EXPECT_EQ(run, nullptr);

  iopeg_study* st = nullptr;
  EXPECT_EQ(iopeg_study_read_csv("/nonexistent/x.csv", &st), IOPEG_IO);
  iopeg_study_kind kind;
  EXPECT_EQ(iopeg_parse_study_kind("bogus", &kind), IOPEG_INVALID_ARGUMENT);
  iopeg_precond pc;
  ASSERT_EQ(iopeg_parse_precond("jacobi", &pc), IOPEG_OK);
  EXPECT_EQ(pc, IOPEG_PRECOND_JACOBI);
}

TEST(CApi, RunAndBufferProtocol) {
  iopeg_run_config cfg;
  iopeg_run_config_default(&cfg);
  EXPECT_EQ(cfg.n, 8);
  EXPECT_EQ(cfg.k, 1);
  iopeg_run* run = nullptr;
  ASSERT_EQ(iopeg_run_solve(&cfg, &run), IOPEG_OK);

  int64_t iters = 0;
  int converged = 0;
  double rel = 1.0;
  ASSERT_EQ(iopeg_run_solve_info(run, &iters, &converged, &rel), IOPEG_OK);
  EXPECT_TRUE(converged);
  EXPECT_GT(iters, 0);
  EXPECT_LE(rel, cfg.tol);

  size_t len = 0;
  ASSERT_EQ(iopeg_run_solution(run, nullptr, 0, &len), IOPEG_OK);
  EXPECT_EQ(len, static_cast<size_t>(81 + 128));
  std::vector<double> sol(len, -7.0);
  ASSERT_EQ(iopeg_run_solution(run, sol.data(), 3, &len), IOPEG_OK);
  EXPECT_NE(sol[0], -7.0);
  EXPECT_EQ(sol[3], -7.0);  // untouched beyond capacity
  EXPECT_EQ(iopeg_run_solution(run, sol.data(), sol.size(), nullptr), IOPEG_INVALID_ARGUMENT);

  ASSERT_EQ(iopeg_run_residual_history(run, nullptr, 0, &len), IOPEG_OK);
  EXPECT_EQ(len, static_cast<size_t>(iters) + 1);

  iopeg_error_report e;
  ASSERT_EQ(iopeg_run_errors(run, &e), IOPEG_OK);
  EXPECT_GT(e.l2_error, 0.0);
  EXPECT_LT(e.l2_error, 1e-2);
  EXPECT_LE(e.conservation_residual, 1e-10);
  iopeg_run_destroy(run);
}

TEST(CApi, NonConvergedRunStillReturnsHandle) {
  iopeg_run_config cfg;
  iopeg_run_config_default(&cfg);
  cfg.max_iters = 2;
  iopeg_run* run = nullptr;
  ASSERT_EQ(iopeg_run_solve(&cfg, &run), IOPEG_OK);
  int64_t iters = 0;
  int converged = 1;
  ASSERT_EQ(iopeg_run_solve_info(run, &iters, &converged, nullptr), IOPEG_OK);
  EXPECT_EQ(converged, 0);
  EXPECT_EQ(iters, 2);
  iopeg_run_destroy(run);
}

TEST(CApi, SpectralBounds) {
  iopeg_run_config cfg;
  iopeg_run_config_default(&cfg);
  cfg.n = 4;
  double lo = 0, hi = 0;
  ASSERT_EQ(iopeg_spectral_bounds(&cfg, IOPEG_EIGEN_DENSE, &lo, &hi), IOPEG_OK);
  EXPECT_GT(lo, 0.0);
  EXPECT_LE(hi, 2.0 + 1e-10);
  double lo2 = 0, hi2 = 0;
  ASSERT_EQ(iopeg_spectral_bounds(&cfg, IOPEG_EIGEN_LANCZOS, &lo2, &hi2), IOPEG_OK);
  EXPECT_NEAR(lo2, lo, 1e-6 * lo);
  EXPECT_NEAR(hi2, hi, 1e-6 * hi);
}

TEST(CApi, StudyRowsTableAndCsvRoundTrip) {
  const int64_t ns[] = {4, 8};
  const double kappas[] = {10.0};
  iopeg_study_config cfg;
  iopeg_study_config_default(&cfg);
  cfg.n_list = ns;
  cfg.n_count = 2;
  cfg.kappa0_list = kappas;
  cfg.kappa0_count = 1;
  iopeg_study* st = nullptr;
  ASSERT_EQ(iopeg_study_run(&cfg, &st), IOPEG_OK);
  ASSERT_EQ(iopeg_study_row_count(st), 2u);

  iopeg_study_row r0, r1;
  ASSERT_EQ(iopeg_study_row_at(st, 0, &r0), IOPEG_OK);
  ASSERT_EQ(iopeg_study_row_at(st, 1, &r1), IOPEG_OK);
  EXPECT_EQ(r0.has_rates, 0);
  EXPECT_EQ(r1.has_rates, 1);
  EXPECT_EQ(r1.n, 8);
  EXPECT_EQ(r1.kappa0, 10.0);
  EXPECT_GT(r1.l2_rate, 1.5);
  EXPECT_EQ(iopeg_study_row_at(st, 2, &r0), IOPEG_INVALID_ARGUMENT);

  size_t len = 0;
  ASSERT_EQ(iopeg_study_format_table(st, nullptr, 0, &len), IOPEG_OK);
  std::string table(len, 'x');
  ASSERT_EQ(iopeg_study_format_table(st, table.data(), table.size(), &len), IOPEG_OK);
  EXPECT_EQ(table.back(), '\0');
  EXPECT_NE(table.find("kappa0"), std::string::npos);
  char tiny[5];
  ASSERT_EQ(iopeg_study_format_table(st, tiny, sizeof tiny, &len), IOPEG_OK);
  EXPECT_EQ(std::string(tiny).size(), 4u);

  const std::string path = ::testing::TempDir() + "capi_roundtrip.csv";
  ASSERT_EQ(iopeg_study_write_csv(st, path.c_str()), IOPEG_OK);
  iopeg_study* back = nullptr;
  ASSERT_EQ(iopeg_study_read_csv(path.c_str(), &back), IOPEG_OK);
  ASSERT_EQ(iopeg_study_row_count(back), 2u);
  iopeg_study_row b1;
  ASSERT_EQ(iopeg_study_row_at(back, 1, &b1), IOPEG_OK);
  EXPECT_EQ(b1.l2_error, r1.l2_error);
  EXPECT_EQ(b1.l2_rate, r1.l2_rate);
  EXPECT_EQ(b1.iterations, r1.iterations);
  std::remove(path.c_str());
  iopeg_study_destroy(back);
  iopeg_study_destroy(st);
}
