#include "cimset/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <random>

namespace cimset {

double FactorMatrix::support_violation() const {
  double worst = 0.0;
  for (int j = 0; j < n(); ++j) {
    const NodeSet support = labels[static_cast<std::size_t>(j)].support();
    for (int i = 0; i < n(); ++i)
      if (!support.contains(i + 1)) worst = std::max(worst, std::abs(entries(i, j)));
  }
  return worst;
}

std::optional<DirectedGraph> FactorMatrix::as_graph() const {
  DirectedGraph g(n());
  NodeSet seen;
  for (const Family& f : labels) {
    if (seen.contains(f.child)) return std::nullopt;
    seen = seen.with(f.child);
    g.set_parents(f.child, f.parents);
  }
  return g;
}

FactorMatrix FactorMatrix::in_child_order() const {
  if (!as_graph()) throw InvalidArgument("factor labels do not describe a graph");
  FactorMatrix out{Eigen::MatrixXd(n(), n()), std::vector<Family>(labels.size())};
  for (int j = 0; j < n(); ++j) {
    const Family& f = labels[static_cast<std::size_t>(j)];
    out.entries.col(f.child - 1) = entries.col(j);
    out.labels[static_cast<std::size_t>(f.child - 1)] = f;
  }
  return out;
}

std::string to_string(Verdict v) {
  return v == Verdict::EvidenceEquivalent ? "EvidenceEquivalent" : "EvidenceInequivalent";
}

void validate_config(const OrthSolverConfig& cfg) {
  if (cfg.restarts < 1) throw InvalidArgument("restarts must be positive");
  if (cfg.max_iters < 1) throw InvalidArgument("max_iters must be positive");
  if (!(cfg.step_tol > 0)) throw InvalidArgument("step tolerance must be positive");
  if (!(cfg.tau > 0)) throw InvalidArgument("residual tolerance must be positive");
}

namespace {

void check_factor(const FactorMatrix& q) {
  if (q.entries.rows() != q.entries.cols()) throw InvalidArgument("factor matrix must be square");
  if (q.labels.size() != static_cast<std::size_t>(q.n())) throw InvalidArgument("factor needs one label per column");
  for (const Family& f : q.labels) validate_family(f, q.n());
}

bool numerically_singular(const Eigen::MatrixXd& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  return std::abs((m / scale).fullPivLu().determinant()) < 1e-12;
}

std::size_t find_label(const FactorMatrix& q, const Family& f) {
  for (std::size_t j = 0; j < q.labels.size(); ++j)
    if (q.labels[j] == f) return j;
  throw InvalidArgument("no column labelled " + to_string(f));
}

}  // namespace

FactorMatrix random_factor(const DirectedGraph& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = g.n();
  FactorMatrix q{Eigen::MatrixXd::Zero(n, n), families(g)};
  for (int j = 0; j < n; ++j) {
    for (NodeId i : g.family_set(j + 1).elements()) {
      double x = normal(rng);
      if (i == j + 1)
        while (std::abs(x) < 0.1) x = normal(rng);
      q.entries(i - 1, j) = x;
    }
  }
  return q;
}

Eigen::MatrixXd precision_from_factor(const FactorMatrix& q) {
  if (q.entries.rows() != q.entries.cols()) throw InvalidArgument("factor matrix must be square");
  if (numerically_singular(q.entries)) throw InvalidArgument("factor matrix is rank deficient");
  return q.entries * q.entries.transpose();
}

Eigen::MatrixXd precision_from_sem(const SemParams& p) {
  const auto n = p.lambda.rows();
  if (p.lambda.cols() != n || p.omega.size() != n) throw InvalidArgument("SEM parameter dimensions disagree");
  if ((p.omega.array() <= 0.0).any()) throw InvalidArgument("noise variances must be positive");
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - p.lambda;
  if (numerically_singular(a)) throw InvalidArgument("I - Lambda is singular");
  return a.transpose() * p.omega.cwiseInverse().asDiagonal() * a;
}

SemParams random_sem(const DirectedGraph& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> variance(0.5, 2.0);
  const int n = g.n();
  SemParams p{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd(n)};
  for (auto [from, to] : g.edges()) p.lambda(to - 1, from - 1) = normal(rng);
  for (int i = 0; i < n; ++i) p.omega(i) = variance(rng);
  return p;
}

FactorMatrix factor_from_sem(const DirectedGraph& g, const SemParams& p) {
  const int n = g.n();
  if (p.lambda.rows() != n || p.lambda.cols() != n || p.omega.size() != n)
    throw InvalidArgument("SEM parameter dimensions disagree with the graph");
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - p.lambda;
  return {a.transpose() * p.omega.cwiseSqrt().cwiseInverse().asDiagonal(), families(g)};
}

FactorMatrix givens_flip_factor(const FactorMatrix& q, const CoveredFlipMove& flip) {
  check_factor(q);
  validate_move(flip, q.n());
  const NodeSet a = flip.common_parents;
  const NodeId b = flip.from, c = flip.to;
  const std::size_t ju = find_label(q, Family{a, b});
  const std::size_t jv = find_label(q, Family{a.with(b), c});
  const Eigen::VectorXd u = q.entries.col(static_cast<Eigen::Index>(ju));
  const Eigen::VectorXd v = q.entries.col(static_cast<Eigen::Index>(jv));
  const double ub = u(b - 1), vb = v(b - 1);
  if (ub == 0.0) throw InvalidArgument("degenerate rotation: pivot entry at row " + std::to_string(b) + " is zero");
  const double r = std::hypot(ub, vb);
  const double cs = ub / r, sn = vb / r;

  FactorMatrix out = q;
  out.entries.col(static_cast<Eigen::Index>(ju)) = cs * u + sn * v;
  out.entries.col(static_cast<Eigen::Index>(jv)) = -sn * u + cs * v;
  out.entries(b - 1, static_cast<Eigen::Index>(jv)) = 0.0;
  out.labels[ju] = Family{a.with(c), b};
  out.labels[jv] = Family{a, c};
  return out;
}

FactorMatrix relabel_column(const FactorMatrix& q, const Family& old_label, const Family& new_label) {
  check_factor(q);
  validate_move(ColumnRelabelMove{old_label, new_label}, q.n());
  const std::size_t j = find_label(q, old_label);
  if (q.entries(new_label.child - 1, static_cast<Eigen::Index>(j)) == 0.0)
    throw InvalidArgument("column " + to_string(old_label) + " has a zero entry at row " +
                          std::to_string(new_label.child));
  FactorMatrix out = q;
  out.labels[j] = new_label;
  return out;
}

FactorMatrix reverse_cycle_factor(const FactorMatrix& q, const Cycle& cycle) {
  check_factor(q);
  validate_move(CycleReversalMove{cycle}, q.n());
  const auto g = q.as_graph();
  if (!g) throw InvalidArgument("factor labels do not describe a graph");
  const DirectedGraph target = reverse_cycle(*g, cycle);  // validates the cycle
  FactorMatrix out = q;
  const auto& nodes = cycle.nodes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId v = nodes[i], next = nodes[(i + 1) % nodes.size()];
    out = relabel_column(out, Family{g->parents(next), next}, Family{target.parents(v), v});
  }
  return out;
}

FactorMatrix apply_factor_move(const FactorMatrix& q, const MoveRecord& move) {
  return std::visit(
      [&q](const auto& m) -> FactorMatrix {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CoveredFlipMove>)
          return givens_flip_factor(q, m);
        else if constexpr (std::is_same_v<T, CycleReversalMove>)
          return reverse_cycle_factor(q, m.cycle);
        else
          return relabel_column(q, m.old_label, m.new_label);
      },
      move);
}

namespace {

struct PlanePair {
  int i, j;
};

std::vector<PlanePair> plane_pairs(int n) {
  std::vector<PlanePair> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.push_back({i, j});
  return out;
}

// m <- m * R(i,j,theta)
void rotate_columns(Eigen::MatrixXd& m, PlanePair p, double c, double s) {
  const Eigen::VectorXd ci = m.col(p.i), cj = m.col(p.j);
  m.col(p.i) = c * ci + s * cj;
  m.col(p.j) = -s * ci + c * cj;
}

// m <- R(i,j,theta) * m
void rotate_rows(Eigen::MatrixXd& m, PlanePair p, double c, double s) {
  const Eigen::RowVectorXd ri = m.row(p.i), rj = m.row(p.j);
  m.row(p.i) = c * ri - s * rj;
  m.row(p.j) = s * ri + c * rj;
}

class FeasibilityProblem {
 public:
  FeasibilityProblem(const Eigen::MatrixXd& q0, const DirectedGraph& target)
      : q0_(q0), n_(static_cast<int>(q0.rows())), pairs_(plane_pairs(n_)) {
    if (q0.rows() != q0.cols() || n_ != target.n()) throw InvalidArgument("factor and target sizes disagree");
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i < n_; ++i)
        if (i != j && !target.has_edge(i + 1, j + 1)) forbidden_.push_back({i, j});
  }

  std::size_t angle_count() const { return pairs_.size(); }

  Eigen::MatrixXd product(const std::vector<double>& angles, const std::vector<int>& signs) const {
    Eigen::MatrixXd m = q0_;
    for (std::size_t k = 0; k < pairs_.size(); ++k) rotate_columns(m, pairs_[k], std::cos(angles[k]), std::sin(angles[k]));
    for (int j = 0; j < n_; ++j) m.col(j) *= signs[static_cast<std::size_t>(j)];
    return m;
  }

  Eigen::VectorXd residuals(const Eigen::MatrixXd& m) const {
    Eigen::VectorXd r(static_cast<Eigen::Index>(forbidden_.size()));
    for (std::size_t t = 0; t < forbidden_.size(); ++t) r(static_cast<Eigen::Index>(t)) = m(forbidden_[t].i, forbidden_[t].j);
    return r;
  }

  double value(const std::vector<double>& angles, const std::vector<int>& signs) const {
    return residuals(product(angles, signs)).squaredNorm();
  }

  // Residual vector and its Jacobian with respect to the angles.
  void linearize(const std::vector<double>& angles, const std::vector<int>& signs, Eigen::VectorXd& r,
                 Eigen::MatrixXd& jac) const {
    const std::size_t m = pairs_.size();
    std::vector<double> cs(m), sn(m);
    for (std::size_t k = 0; k < m; ++k) {
      cs[k] = std::cos(angles[k]);
      sn[k] = std::sin(angles[k]);
    }
    // prefix[k] = Q0 R_0 ... R_{k-1}
    std::vector<Eigen::MatrixXd> prefix(m + 1);
    prefix[0] = q0_;
    for (std::size_t k = 0; k < m; ++k) {
      prefix[k + 1] = prefix[k];
      rotate_columns(prefix[k + 1], pairs_[k], cs[k], sn[k]);
    }
    Eigen::MatrixXd full = prefix[m];
    for (int j = 0; j < n_; ++j) full.col(j) *= signs[static_cast<std::size_t>(j)];
    r = residuals(full);

    jac.resize(static_cast<Eigen::Index>(forbidden_.size()), static_cast<Eigen::Index>(m));
    // suffix = R_{k+1} ... R_{m-1} D, built from the back.
    Eigen::MatrixXd suffix = Eigen::MatrixXd::Zero(n_, n_);
    for (int j = 0; j < n_; ++j) suffix(j, j) = signs[static_cast<std::size_t>(j)];
    for (std::size_t kk = m; kk-- > 0;) {
      const PlanePair p = pairs_[kk];
      const Eigen::VectorXd pi = prefix[kk].col(p.i), pj = prefix[kk].col(p.j);
      const Eigen::VectorXd di = -sn[kk] * pi + cs[kk] * pj;
      const Eigen::VectorXd dj = -cs[kk] * pi - sn[kk] * pj;
      for (std::size_t t = 0; t < forbidden_.size(); ++t) {
        const auto [a, b] = forbidden_[t];
        jac(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(kk)) = di(a) * suffix(p.i, b) + dj(a) * suffix(p.j, b);
      }
      rotate_rows(suffix, p, cs[kk], sn[kk]);
    }
  }

 private:
  struct Cell {
    int i, j;
  };
  Eigen::MatrixXd q0_;
  int n_;
  std::vector<PlanePair> pairs_;
  std::vector<Cell> forbidden_;
};

struct RestartResult {
  double objective;
  std::vector<double> angles;
  std::vector<int> signs;
  std::vector<double> trace;
};

// Levenberg-Marquardt steps with Armijo backtracking on the sum of squares.
RestartResult descend(const FeasibilityProblem& prob, std::vector<double> angles, std::vector<int> signs,
                      const OrthSolverConfig& cfg, double target_objective) {
  const auto m = static_cast<Eigen::Index>(angles.size());
  RestartResult res{0.0, {}, {}, {}};
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  prob.linearize(angles, signs, r, jac);
  double f = r.squaredNorm();
  if (cfg.record_trace) res.trace.push_back(f);
  double mu = -1.0;

  for (int iter = 0; iter < cfg.max_iters && f > target_objective && m > 0; ++iter) {
    const Eigen::VectorXd g = jac.transpose() * r;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    if (mu < 0) mu = 1e-3 * std::max(jtj.diagonal().maxCoeff(), 1e-12);
    if (g.norm() == 0.0) break;

    bool accepted = false;
    bool stalled = false;
    while (!accepted) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal().array() += mu;
      const Eigen::VectorXd delta = lhs.ldlt().solve(-g);
      const double slope = g.dot(delta);  // half the directional derivative of f
      if (!(slope < 0.0)) {
        mu *= 10.0;
        if (mu > 1e12) {
          stalled = true;
          break;
        }
        continue;
      }
      double alpha = 1.0;
      while (alpha >= 1e-8) {
        std::vector<double> trial = angles;
        for (Eigen::Index k = 0; k < m; ++k) trial[static_cast<std::size_t>(k)] += alpha * delta(k);
        const double f_new = prob.value(trial, signs);
        if (f_new <= f + 2e-4 * alpha * slope) {
          if (alpha * delta.norm() < cfg.step_tol) stalled = true;
          angles = std::move(trial);
          accepted = true;
          mu = alpha == 1.0 ? std::max(mu / 3.0, 1e-15) : mu * 2.0;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        mu *= 10.0;
        if (mu > 1e12) {
          stalled = true;
          break;
        }
      }
    }
    if (accepted) {
      prob.linearize(angles, signs, r, jac);
      f = r.squaredNorm();
      if (cfg.record_trace) res.trace.push_back(f);
    }
    if (stalled) break;
  }
  res.objective = f;
  res.angles = std::move(angles);
  res.signs = std::move(signs);
  return res;
}

}  // namespace

Eigen::MatrixXd givens_product(int n, const std::vector<double>& angles, const std::vector<int>& signs) {
  const auto pairs = plane_pairs(n);
  if (angles.size() != pairs.size() || signs.size() != static_cast<std::size_t>(n))
    throw InvalidArgument("givens_product: wrong parameter count");
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t k = 0; k < pairs.size(); ++k) rotate_columns(u, pairs[k], std::cos(angles[k]), std::sin(angles[k]));
  for (int j = 0; j < n; ++j) u.col(j) *= signs[static_cast<std::size_t>(j)];
  return u;
}

ObjectiveEval feasibility_objective(const Eigen::MatrixXd& q0, const DirectedGraph& target,
                                    const std::vector<double>& angles, const std::vector<int>& signs) {
  FeasibilityProblem prob(q0, target);
  if (angles.size() != prob.angle_count() || signs.size() != static_cast<std::size_t>(target.n()))
    throw InvalidArgument("feasibility_objective: wrong parameter count");
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  prob.linearize(angles, signs, r, jac);
  return {r.squaredNorm(), 2.0 * jac.transpose() * r};
}

OrthSolution orth_feasibility(const FactorMatrix& q0, const DirectedGraph& target, const OrthSolverConfig& cfg) {
  validate_config(cfg);
  check_factor(q0);
  if (numerically_singular(q0.entries)) throw InvalidArgument("factor matrix is rank deficient");
  const FeasibilityProblem prob(q0.entries, target);
  const double scale = q0.entries.norm();
  const double target_objective = std::pow(1e-4 * cfg.tau * scale, 2);
  const double feasible_objective = std::pow(cfg.tau * scale, 2);
  const int n = target.n();

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> angle_dist(-std::numbers::pi, std::numbers::pi);
  std::bernoulli_distribution flip_sign(0.5);

  OrthSolution best;
  double best_objective = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    std::vector<double> angles(prob.angle_count(), 0.0);
    std::vector<int> signs(static_cast<std::size_t>(n), 1);
    // Restart 0 starts from the identity.
    if (restart > 0) {
      for (auto& a : angles) a = angle_dist(rng);
      for (auto& s : signs) s = flip_sign(rng) ? -1 : 1;
    }
    RestartResult res = descend(prob, std::move(angles), std::move(signs), cfg, target_objective);
    if (cfg.record_trace) best.traces.push_back(res.trace);
    best.restarts_run = restart + 1;
    if (res.objective < best_objective) {
      best_objective = res.objective;
      best.angles = std::move(res.angles);
      best.signs = std::move(res.signs);
      best.best_restart = restart;
    }
    if (cfg.stop_when_feasible && best_objective < feasible_objective) break;
  }
  best.u = givens_product(n, best.angles, best.signs);
  best.residual = std::sqrt(best_objective) / scale;
  return best;
}

EquivVerdict covariance_equiv_numeric(const DirectedGraph& g, const DirectedGraph& h, const OrthSolverConfig& cfg,
                                      int trials, int jobs) {
  if (g.n() != h.n()) throw InvalidArgument("graphs have different node counts");
  if (trials < 1) throw InvalidArgument("trials must be positive");
  validate_config(cfg);

  auto run_trial = [&](int t) {
    OrthSolverConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(t);
    const double forward = orth_feasibility(random_factor(g, c.seed), h, c).residual;
    const double backward = orth_feasibility(random_factor(h, c.seed), g, c).residual;
    return std::pair{forward, backward};
  };

  EquivVerdict out;
  out.tau = cfg.tau;
  out.trials = trials;
  out.seed = cfg.seed;
  std::vector<std::pair<double, double>> results(static_cast<std::size_t>(trials));
  if (jobs <= 1) {
    for (int t = 0; t < trials; ++t) results[static_cast<std::size_t>(t)] = run_trial(t);
  } else {
    for (int start = 0; start < trials; start += jobs) {
      std::vector<std::future<std::pair<double, double>>> batch;
      for (int t = start; t < std::min(trials, start + jobs); ++t) batch.push_back(std::async(std::launch::async, run_trial, t));
      for (std::size_t k = 0; k < batch.size(); ++k) results[static_cast<std::size_t>(start) + k] = batch[k].get();
    }
  }
  bool all_feasible = true;
  for (auto [fwd, bwd] : results) {
    out.g_to_h.push_back(fwd);
    out.h_to_g.push_back(bwd);
    all_feasible = all_feasible && fwd < cfg.tau && bwd < cfg.tau;
  }
  out.verdict = all_feasible ? Verdict::EvidenceEquivalent : Verdict::EvidenceInequivalent;
  return out;
}

}  // namespace cimset
