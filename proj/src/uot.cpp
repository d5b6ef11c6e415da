#include "specfuse/uot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "specfuse/errors.hpp"

namespace specfuse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double kl_term(double a, double b) {
  if (a == 0.0) return b;
  if (b == 0.0) return kInf;
  return a * std::log(a / b) - a + b;
}

// (num / den)^e with 0/0 = 0. A zero denominator only occurs for an all-zero
// row or column, whose entries stay zero whatever the factor.
double ratio_pow(double num, double den, double e) {
  if (num == 0.0 || den == 0.0) return 0.0;
  const double r = num / den;
  return e == 0.5 ? std::sqrt(r) : std::pow(r, e);
}

struct PlanState {
  std::vector<double> rows;  // T 1
  std::vector<double> cols;  // T^T 1
  double inner = 0.0;        // <C, T>
};

PlanState measure(const TransportPlan& plan) {
  const auto& c = *plan.pattern;
  PlanState s{std::vector<double>(c.rows(), 0.0), std::vector<double>(c.cols(), 0.0), 0.0};
  const auto offsets = c.row_offsets();
  const auto cols = c.col_index();
  const auto cost = c.cost();
  for (std::size_t i = 0; i < c.rows(); ++i) {
    double r = 0.0;
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      const double v = plan.values[e];
      r += v;
      s.cols[cols[e]] += v;
      s.inner += cost[e] * v;
    }
    s.rows[i] = r;
  }
  return s;
}

// In-place MM step. `state` holds the sums of the current plan on entry and
// of the updated plan on exit.
void mm_step(const SparseCostMatrix& c, std::span<const double> decay, std::vector<double>& values,
             std::span<const double> source, std::span<const double> barycenter,
             MarginalPenalty eta, PlanState& state, std::vector<double>& row_factor,
             std::vector<double>& col_factor) {
  const double total = eta.source + eta.target;
  const double e1 = eta.source / total;
  const double e2 = eta.target / total;
  row_factor.resize(c.rows());
  col_factor.resize(c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i) row_factor[i] = ratio_pow(source[i], state.rows[i], e1);
  for (std::size_t k = 0; k < c.cols(); ++k) col_factor[k] = ratio_pow(barycenter[k], state.cols[k], e2);

  std::fill(state.cols.begin(), state.cols.end(), 0.0);
  state.inner = 0.0;
  const auto offsets = c.row_offsets();
  const auto cols = c.col_index();
  const auto cost = c.cost();
  double* colsum = state.cols.data();
  for (std::size_t i = 0; i < c.rows(); ++i) {
    const double f = row_factor[i];
    double r = 0.0;
    if (f == 0.0) {
      std::fill(values.begin() + static_cast<std::ptrdiff_t>(offsets[i]),
                values.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]), 0.0);
    } else {
      double inner = 0.0;
      for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
        const double v = values[e] * decay[e] * f * col_factor[cols[e]];
        values[e] = v;
        r += v;
        colsum[cols[e]] += v;
        inner += cost[e] * v;
      }
      state.inner += inner;
    }
    state.rows[i] = r;
  }
}

std::vector<double> decay_factors(const SparseCostMatrix& c, MarginalPenalty eta) {
  const double total = eta.source + eta.target;
  std::vector<double> d(c.nnz());
  const auto cost = c.cost();
  for (std::size_t e = 0; e < d.size(); ++e) d[e] = std::exp(-cost[e] / total);
  return d;
}

std::vector<double> weighted_barycenter(std::span<const std::vector<double>> col_sums,
                                        const UotConfig& cfg) {
  const std::size_t k_size = col_sums.front().size();
  std::vector<double> g(k_size, 0.0);
  double denom = 0.0;
  for (std::size_t p = 0; p < col_sums.size(); ++p) {
    const double w = cfg.lambda[p] * cfg.eta[p].target;
    if (w == 0.0) continue;
    denom += w;
    for (std::size_t k = 0; k < k_size; ++k) g[k] += w * col_sums[p][k];
  }
  for (double& v : g) v /= denom;
  return g;
}

double objective_from_state(std::span<const PlanState> states, std::span<const double> g,
                            std::span<const std::vector<double>> inputs, const UotConfig& cfg) {
  double total = 0.0;
  for (std::size_t p = 0; p < states.size(); ++p) {
    if (cfg.lambda[p] == 0.0) continue;
    const double term = states[p].inner + cfg.eta[p].source * kl_div(states[p].rows, inputs[p]) +
                        cfg.eta[p].target * kl_div(states[p].cols, g);
    total += cfg.lambda[p] * term;
  }
  return total;
}

void check_problem(std::span<const std::vector<double>> inputs, std::span<const CostPtr> costs,
                   const UotConfig& cfg) {
  cfg.validate();
  if (inputs.size() != cfg.inputs() || costs.size() != cfg.inputs()) {
    throw DomainError("expected " + std::to_string(cfg.inputs()) + " inputs and cost matrices");
  }
  const std::size_t k_size = costs.front()->cols();
  for (std::size_t p = 0; p < costs.size(); ++p) {
    if (!costs[p]) throw DomainError("missing cost matrix for input " + std::to_string(p + 1));
    if (costs[p]->cols() != k_size) {
      throw DomainError("cost matrix " + std::to_string(p + 1) + " has " +
                        std::to_string(costs[p]->cols()) + " target columns, expected " +
                        std::to_string(k_size));
    }
    if (costs[p]->rows() != inputs[p].size()) {
      throw DomainError("input " + std::to_string(p + 1) + " has " +
                        std::to_string(inputs[p].size()) + " weights but its cost matrix has " +
                        std::to_string(costs[p]->rows()) + " rows");
    }
    for (double a : inputs[p]) {
      if (!std::isfinite(a) || a < 0.0) {
        throw DomainError("input " + std::to_string(p + 1) + " has a negative or non-finite weight");
      }
    }
  }
}

}  // namespace

UotConfig UotConfig::uniform(std::size_t inputs, double eta) {
  UotConfig cfg;
  cfg.lambda.assign(inputs, 1.0 / static_cast<double>(inputs));
  cfg.eta.assign(inputs, MarginalPenalty{eta, eta});
  return cfg;
}

void UotConfig::validate() const {
  if (lambda.empty()) throw DomainError("at least one input is required");
  if (eta.size() != lambda.size()) throw DomainError("need one eta pair per input");
  double sum = 0.0;
  for (double l : lambda) {
    if (!(l >= 0.0)) throw DomainError("barycenter weights must be >= 0");
    sum += l;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DomainError("barycenter weights must sum to 1");
  bool any_target = false;
  for (std::size_t p = 0; p < eta.size(); ++p) {
    if (!(eta[p].source > 0.0) || !(eta[p].target > 0.0) || !std::isfinite(eta[p].source) ||
        !std::isfinite(eta[p].target)) {
      throw DomainError("eta values must be positive and finite");
    }
    any_target = any_target || lambda[p] > 0.0;
  }
  if (!any_target) throw DomainError("barycenter weights are all zero");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (max_iter == 0) throw DomainError("max_iter must be >= 1");
  if (!(init_value > 0.0)) throw DomainError("initial value must be positive");
}

TransportPlan TransportPlan::filled(CostPtr pattern, double value) {
  const std::size_t n = pattern->nnz();
  return TransportPlan{std::move(pattern), std::vector<double>(n, value)};
}

std::vector<double> TransportPlan::row_sums() const { return measure(*this).rows; }
std::vector<double> TransportPlan::col_sums() const { return measure(*this).cols; }

double kl_div(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("kl_div needs vectors of equal length");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += kl_term(a[i], b[i]);
  return total;
}

double uot_objective(std::span<const TransportPlan> plans, std::span<const double> barycenter,
                     std::span<const std::vector<double>> inputs, const UotConfig& cfg) {
  cfg.validate();
  if (plans.size() != cfg.inputs() || inputs.size() != cfg.inputs()) {
    throw DomainError("objective needs one plan and one input per barycenter weight");
  }
  std::vector<PlanState> states;
  states.reserve(plans.size());
  for (const auto& plan : plans) states.push_back(measure(plan));
  return objective_from_state(states, barycenter, inputs, cfg);
}

TransportPlan mm_update_plan(const TransportPlan& plan, std::span<const double> source,
                             std::span<const double> barycenter, MarginalPenalty eta) {
  const auto& c = *plan.pattern;
  if (source.size() != c.rows() || barycenter.size() != c.cols()) {
    throw DomainError("mm_update_plan: marginal sizes do not match the pattern");
  }
  TransportPlan out = plan;
  PlanState state = measure(plan);
  const auto decay = decay_factors(c, eta);
  std::vector<double> rf, cf;
  mm_step(c, decay, out.values, source, barycenter, eta, state, rf, cf);
  return out;
}

std::vector<double> mm_update_barycenter(std::span<const TransportPlan> plans,
                                         const UotConfig& cfg) {
  cfg.validate();
  if (plans.size() != cfg.inputs()) throw DomainError("need one plan per barycenter weight");
  std::vector<std::vector<double>> cols;
  cols.reserve(plans.size());
  for (const auto& plan : plans) cols.push_back(plan.col_sums());
  return weighted_barycenter(cols, cfg);
}

BarycenterResult solve_barycenter(std::span<const std::vector<double>> inputs,
                                  std::span<const CostPtr> costs, const UotConfig& cfg) {
  check_problem(inputs, costs, cfg);
  const std::size_t P = costs.size();
  const std::size_t K = costs.front()->cols();

  BarycenterResult result;
  result.weights.assign(K, cfg.init_value);
  std::vector<std::vector<double>> decay(P);
  std::vector<PlanState> states(P);
  for (std::size_t p = 0; p < P; ++p) {
    result.plans.push_back(TransportPlan::filled(costs[p], cfg.init_value));
    decay[p] = decay_factors(*costs[p], cfg.eta[p]);
    states[p] = measure(result.plans[p]);
  }
  const double f0 = objective_from_state(states, result.weights, inputs, cfg);
  result.objective_trace.push_back(f0);
  if (f0 == 0.0) {
    result.converged = true;
    return result;
  }

  // Zero input weights under a positive start make F0 infinite; the first
  // finite objective value then serves as the reference scale.
  double scale = std::isfinite(f0) ? f0 : 0.0;
  std::vector<double> rf, cf;
  std::vector<std::vector<double>> cols(P);
  double previous = f0;
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    for (std::size_t p = 0; p < P; ++p) {
      mm_step(*costs[p], decay[p], result.plans[p].values, inputs[p], result.weights,
              cfg.eta[p], states[p], rf, cf);
    }
    for (std::size_t p = 0; p < P; ++p) cols[p] = states[p].cols;
    result.weights = weighted_barycenter(cols, cfg);
    const double f = objective_from_state(states, result.weights, inputs, cfg);
    result.objective_trace.push_back(f);
    result.iterations = it;
    if (scale == 0.0) {
      if (!std::isfinite(f)) continue;
      if (f == 0.0) {
        result.converged = true;
        break;
      }
      scale = f;
      previous = f;
      continue;
    }
    if (std::abs(f - previous) / scale < cfg.tol) {
      result.converged = true;
      break;
    }
    previous = f;
  }
  return result;
}

std::vector<std::vector<double>> plan_gradient(std::span<const TransportPlan> plans,
                                               std::span<const double> barycenter,
                                               std::span<const std::vector<double>> inputs,
                                               const UotConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<double>> grads(plans.size());
  for (std::size_t p = 0; p < plans.size(); ++p) {
    const auto& c = *plans[p].pattern;
    const PlanState s = measure(plans[p]);
    const auto offsets = c.row_offsets();
    const auto cols = c.col_index();
    const auto cost = c.cost();
    auto& grad = grads[p];
    grad.assign(c.nnz(), 0.0);
    if (cfg.lambda[p] == 0.0) continue;
    for (std::size_t i = 0; i < c.rows(); ++i) {
      const double src = inputs[p][i] > 0.0 ? std::log(s.rows[i] / inputs[p][i]) : kInf;
      for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
        const std::size_t k = cols[e];
        const double tgt = barycenter[k] > 0.0 ? std::log(s.cols[k] / barycenter[k]) : kInf;
        grad[e] = cfg.lambda[p] * (cost[e] + cfg.eta[p].source * src + cfg.eta[p].target * tgt);
      }
    }
  }
  return grads;
}

double kkt_residual(const BarycenterResult& result, std::span<const std::vector<double>> inputs,
                    const UotConfig& cfg) {
  const auto grads = plan_gradient(result.plans, result.weights, inputs, cfg);
  double worst = 0.0;
  for (std::size_t p = 0; p < result.plans.size(); ++p) {
    const auto& values = result.plans[p].values;
    if (values.empty() || cfg.lambda[p] == 0.0) continue;
    const double tau = 1e-12 * *std::max_element(values.begin(), values.end());
    for (std::size_t e = 0; e < values.size(); ++e) {
      if (values[e] > tau) {
        const double g = std::abs(grads[p][e]);
        if (!std::isfinite(g)) return kInf;
        worst = std::max(worst, g);
      }
    }
  }
  return worst;
}

}  // namespace specfuse
