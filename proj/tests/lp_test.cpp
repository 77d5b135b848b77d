#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dersizer/dual_simplex.hpp"
#include "support/dense_simplex.hpp"

namespace {

using dersizer::lp::DualSimplex;
using dersizer::lp::Problem;
using dersizer::lp::Status;
using dersizer::testkit::DenseLp;
constexpr double kInf = std::numeric_limits<double>::infinity();

Problem to_problem(const DenseLp& d) {
  Problem p;
  p.num_cols = static_cast<int>(d.c.size());
  p.num_rows = static_cast<int>(d.a.size());
  p.cost = d.c;
  p.col_lower.assign(p.num_cols, 0.0);
  p.col_upper = d.upper;
  for (int i = 0; i < p.num_rows; ++i) {
    p.row_lower.push_back(d.sense[i] < 0 ? -kInf : d.b[i]);
    p.row_upper.push_back(d.sense[i] > 0 ? kInf : d.b[i]);
  }
  p.col_start.push_back(0);
  for (int j = 0; j < p.num_cols; ++j) {
    for (int i = 0; i < p.num_rows; ++i) {
      if (d.a[i][j] != 0.0) {
        p.row_index.push_back(i);
        p.value.push_back(d.a[i][j]);
      }
    }
    p.col_start.push_back(static_cast<int>(p.row_index.size()));
  }
  return p;
}

Problem single(double cost, double lo, double up, double row_lo, double row_up) {
  Problem p;
  p.num_cols = 1;
  p.num_rows = 1;
  p.cost = {cost};
  p.col_lower = {lo};
  p.col_upper = {up};
  p.row_lower = {row_lo};
  p.row_upper = {row_up};
  p.col_start = {0, 1};
  p.row_index = {0};
  p.value = {1.0};
  return p;
}

TEST(DualSimplex, MinimizeAgainstLowerRow) {
  DualSimplex lp(single(1.0, -kInf, kInf, 3.0, kInf));
  ASSERT_EQ(lp.solve(), Status::kOptimal);
  EXPECT_NEAR(lp.objective(), 3.0, 1e-9);
  EXPECT_NEAR(lp.col_values()[0], 3.0, 1e-9);
}

TEST(DualSimplex, MaximizeAgainstUpperRow) {
  DualSimplex lp(single(-1.0, 0.0, kInf, -kInf, 5.0));
  ASSERT_EQ(lp.solve(), Status::kOptimal);
  EXPECT_NEAR(lp.objective(), -5.0, 1e-9);
}

TEST(DualSimplex, DetectsInfeasibleRows) {
  // x + y >= 4 with x, y in [0, 1]
  Problem p;
  p.num_cols = 2;
  p.num_rows = 1;
  p.cost = {1.0, 1.0};
  p.col_lower = {0.0, 0.0};
  p.col_upper = {1.0, 1.0};
  p.row_lower = {4.0};
  p.row_upper = {kInf};
  p.col_start = {0, 1, 2};
  p.row_index = {0, 0};
  p.value = {1.0, 1.0};
  DualSimplex lp(p);
  EXPECT_EQ(lp.solve(), Status::kInfeasible);
}

TEST(DualSimplex, DetectsUnboundedWithRay) {
  // min -x - y  s.t.  x - y <= 1, x, y >= 0
  Problem p;
  p.num_cols = 2;
  p.num_rows = 1;
  p.cost = {-1.0, -1.0};
  p.col_lower = {0.0, 0.0};
  p.col_upper = {kInf, kInf};
  p.row_lower = {-kInf};
  p.row_upper = {1.0};
  p.col_start = {0, 1, 2};
  p.row_index = {0, 0};
  p.value = {1.0, -1.0};
  DualSimplex lp(p);
  ASSERT_EQ(lp.solve(), Status::kUnbounded);
  const auto& ray = lp.ray();
  ASSERT_EQ(ray.size(), 2u);
  EXPECT_LT(-ray[0] - ray[1], 0.0);
  EXPECT_LE(ray[0] - ray[1], 1e-9);
  EXPECT_GE(ray[0], -1e-9);
  EXPECT_GE(ray[1], -1e-9);
}

TEST(DualSimplex, FreeRowIsIgnored) {
  DualSimplex lp(single(1.0, 2.0, 7.0, -kInf, kInf));
  ASSERT_EQ(lp.solve(), Status::kOptimal);
  EXPECT_NEAR(lp.objective(), 2.0, 1e-9);
}

DenseLp random_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim_n(1, 10);
  std::uniform_int_distribution<int> dim_m(1, 8);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> sense(-1, 1);
  DenseLp d;
  const int n = dim_n(rng);
  const int m = dim_m(rng);
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    d.c.push_back(std::round(coef(rng) * 4) / 4);
    d.upper.push_back(1.0 + 9.0 * unit(rng));
    x0[j] = d.upper[j] * unit(rng);
  }
  for (int i = 0; i < m; ++i) {
    std::vector<double> row(n, 0.0);
    double act = 0.0;
    for (int j = 0; j < n; ++j) {
      if (unit(rng) < 0.6) row[j] = std::round(coef(rng) * 2) / 2;
      act += row[j] * x0[j];
    }
    const int s = sense(rng);
    d.a.push_back(row);
    d.sense.push_back(s);
    d.b.push_back(s < 0 ? act + unit(rng) : s > 0 ? act - unit(rng) : act);
  }
  // an occasional infeasible instance
  if (unit(rng) < 0.1 && n >= 1) {
    std::vector<double> row(n, 0.0);
    row[0] = 1.0;
    d.a.push_back(row);
    d.sense.push_back(1);
    d.b.push_back(d.upper[0] + 1.0);
  }
  return d;
}

TEST(DualSimplex, MatchesDenseTableauOnRandomLps) {
  std::mt19937_64 rng(20211);
  int infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const DenseLp d = random_lp(rng);
    const auto expect = dersizer::testkit::dense_simplex(d);
    DualSimplex lp(to_problem(d));
    const Status st = lp.solve();
    if (!expect.feasible) {
      EXPECT_EQ(st, Status::kInfeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    ASSERT_EQ(st, Status::kOptimal) << "trial " << trial << ": " << lp.diagnostics();
    EXPECT_NEAR(lp.objective(), expect.objective, 1e-6 * std::max(1.0, std::abs(expect.objective)))
        << "trial " << trial;
  }
  EXPECT_GT(infeasible, 0);
}

TEST(DualSimplex, WarmStartAfterBoundChange) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    DenseLp d = random_lp(rng);
    DualSimplex lp(to_problem(d));
    if (lp.solve() != Status::kOptimal) continue;
    const auto basis = lp.basis();
    const int j = trial % static_cast<int>(d.c.size());
    const double new_up = d.upper[j] * 0.5;
    d.upper[j] = new_up;
    lp.set_col_bounds(j, 0.0, new_up);
    const Status warm = lp.solve(&basis);
    const auto expect = dersizer::testkit::dense_simplex(d);
    if (!expect.feasible) {
      EXPECT_EQ(warm, Status::kInfeasible) << "trial " << trial;
      continue;
    }
    ASSERT_EQ(warm, Status::kOptimal) << "trial " << trial;
    EXPECT_NEAR(lp.objective(), expect.objective, 1e-6 * std::max(1.0, std::abs(expect.objective)));
  }
}

}  // namespace
