#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cimset/graph.hpp"

namespace cimset {

// Real n x n factor Q of a precision matrix QQ^T. Column j carries a family label whose
// support A+{child} bounds the column's nonzero rows.
struct FactorMatrix {
  Eigen::MatrixXd entries;
  std::vector<Family> labels;

  int n() const { return static_cast<int>(entries.rows()); }
  // Largest magnitude found outside the labelled supports (0 for a consistent factor).
  double support_violation() const;
  // The graph read off the labels when every node is the child of exactly one column.
  std::optional<DirectedGraph> as_graph() const;
  // Columns permuted so that column j is labelled with child j (a right multiplication by a
  // permutation matrix). Requires as_graph() to succeed.
  FactorMatrix in_child_order() const;
};

// Linear SEM parameters: lambda(i,j) is the weight of j -> i, omega the noise variances.
struct SemParams {
  Eigen::MatrixXd lambda;
  Eigen::VectorXd omega;
};

struct OrthSolverConfig {
  int restarts = 50;
  int max_iters = 2000;
  double step_tol = 1e-12;
  double tau = 1e-8;
  std::uint64_t seed = 0;
  // Skip the remaining restarts once one reaches residual < tau.
  bool stop_when_feasible = true;
  // Keep the objective value after every accepted step.
  bool record_trace = false;
};

void validate_config(const OrthSolverConfig& cfg);

struct OrthSolution {
  double residual = 0.0;  // sqrt(objective) / ||Q0||_F at the best restart
  Eigen::MatrixXd u;      // orthogonal
  std::vector<double> angles;
  std::vector<int> signs;
  int best_restart = 0;
  int restarts_run = 0;
  std::vector<std::vector<double>> traces;  // one per restart when record_trace is set
};

enum class Verdict { EvidenceEquivalent, EvidenceInequivalent };
std::string to_string(Verdict v);

struct EquivVerdict {
  Verdict verdict = Verdict::EvidenceInequivalent;
  double tau = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> g_to_h;  // best residual per trial
  std::vector<double> h_to_g;
};

// Standard normal entries on each column's family support; diagonal magnitudes >= 0.1.
FactorMatrix random_factor(const DirectedGraph& g, std::uint64_t seed);

Eigen::MatrixXd precision_from_factor(const FactorMatrix& q);
Eigen::MatrixXd precision_from_sem(const SemParams& p);

// Standard normal edge weights on E(g) and noise variances in [0.5, 2).
SemParams random_sem(const DirectedGraph& g, std::uint64_t seed);
// Q = (I - Lambda)^T Omega^(-1/2), labelled by families(g).
FactorMatrix factor_from_sem(const DirectedGraph& g, const SemParams& p);

// Rotates the columns labelled A->b and A+b->c so that row b of the second vanishes; the
// columns become A+c->b and A->c. QQ^T is unchanged.
FactorMatrix givens_flip_factor(const FactorMatrix& q, const CoveredFlipMove& flip);
FactorMatrix relabel_column(const FactorMatrix& q, const Family& old_label, const Family& new_label);
// Relabels the cycle's columns so each family set moves to the cycle predecessor.
FactorMatrix reverse_cycle_factor(const FactorMatrix& q, const Cycle& cycle);
FactorMatrix apply_factor_move(const FactorMatrix& q, const MoveRecord& move);

// Product of Givens rotations over the pairs (i,j), i<j, in lexicographic order, times diag(signs).
Eigen::MatrixXd givens_product(int n, const std::vector<double>& angles, const std::vector<int>& signs);

// Objective: sum of squares of (Q0 U) at (i,j), i != j, with i -> j not an edge of target.
struct ObjectiveEval {
  double value;
  Eigen::VectorXd gradient;
};
ObjectiveEval feasibility_objective(const Eigen::MatrixXd& q0, const DirectedGraph& target,
                                    const std::vector<double>& angles, const std::vector<int>& signs);

OrthSolution orth_feasibility(const FactorMatrix& q0, const DirectedGraph& target, const OrthSolverConfig& cfg);

// Trial t draws the source factor with seed cfg.seed + t in each direction.
EquivVerdict covariance_equiv_numeric(const DirectedGraph& g, const DirectedGraph& h, const OrthSolverConfig& cfg,
                                      int trials, int jobs = 1);

}  // namespace cimset
