#pragma once

// Fixed-support unbalanced optimal transport barycenter with KL marginal
// penalties, solved by block majorization-minimization:
//
//   F(T_1..T_P, g) = sum_p lambda_p [ <C_p, T_p> + eta1_p KL(T_p 1, a_p)
//                                                + eta2_p KL(T_p^T 1, g) ]
//
// Each iteration applies one multiplicative MM update to every plan (which
// cannot increase its term) followed by the closed-form minimizer in g, so F
// is non-increasing along the iterates. Plans live on the finite pattern of
// their cost matrix; entries outside it are structurally zero.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "specfuse/cost.hpp"

namespace specfuse {

using CostPtr = std::shared_ptr<const SparseCostMatrix>;

// KL weights on the source marginal (eta1) and the barycenter marginal (eta2).
struct MarginalPenalty {
  double source = 1.0;
  double target = 1.0;
};

struct UotConfig {
  std::vector<double> lambda{0.5, 0.5};
  std::vector<MarginalPenalty> eta{{1.0, 1.0}, {1.0, 1.0}};
  double tol = 1e-6;
  std::size_t max_iter = 100000;
  // Starting value of every plan entry and of g. Algorithm default is 1.
  double init_value = 1.0;

  // P inputs, equal weights 1/P, every eta equal.
  static UotConfig uniform(std::size_t inputs, double eta);

  std::size_t inputs() const { return lambda.size(); }
  void validate() const;
};

struct TransportPlan {
  CostPtr pattern;
  std::vector<double> values;  // one per pattern entry

  static TransportPlan filled(CostPtr pattern, double value);
  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
};

struct BarycenterResult {
  std::vector<double> weights;  // g
  std::vector<TransportPlan> plans;
  std::vector<double> objective_trace;  // F at iterate 0, 1, ..., iterations
  std::size_t iterations = 0;
  bool converged = false;
};

// Generalized KL divergence sum a log(a/b) - a + b with 0 log 0 = 0. A pair
// with a = b = 0 contributes 0; a > 0 with b = 0 yields +infinity.
double kl_div(std::span<const double> a, std::span<const double> b);

double uot_objective(std::span<const TransportPlan> plans, std::span<const double> barycenter,
                     std::span<const std::vector<double>> inputs, const UotConfig& cfg);

// One MM step for a single plan:
//   T'_ik = (a_i / r_i)^(eta1/eta) * T_ik exp(-C_ik / eta) * (g_k / c_k)^(eta2/eta)
// with r, c the row and column sums of T, eta = eta1 + eta2 and 0/0 = 0.
TransportPlan mm_update_plan(const TransportPlan& plan, std::span<const double> source,
                             std::span<const double> barycenter, MarginalPenalty eta);

// Closed-form g = sum_p lambda_p eta2_p (T_p^T 1) / sum_p lambda_p eta2_p.
std::vector<double> mm_update_barycenter(std::span<const TransportPlan> plans,
                                         const UotConfig& cfg);

// Runs the block MM iteration from the configured start until the relative
// objective change |F_k - F_{k-1}| / F_0 drops below cfg.tol. When F_0 is
// infinite (a zero input weight under the positive start) the first finite
// value replaces F_0. Sources may have empty pattern rows (their mass is left
// untransported).
BarycenterResult solve_barycenter(std::span<const std::vector<double>> inputs,
                                  std::span<const CostPtr> costs, const UotConfig& cfg);

// dF/dT at every pattern entry of every plan (g held fixed).
std::vector<std::vector<double>> plan_gradient(std::span<const TransportPlan> plans,
                                               std::span<const double> barycenter,
                                               std::span<const std::vector<double>> inputs,
                                               const UotConfig& cfg);

// Largest |dF/dT_ik| over entries with T_ik > 1e-12 * max(T_p). +infinity if
// such an entry has a zero source weight or zero barycenter weight.
double kkt_residual(const BarycenterResult& result, std::span<const std::vector<double>> inputs,
                    const UotConfig& cfg);

}  // namespace specfuse
