#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sale/partition.h"
#include "sale/topology.h"

// Generalized Aloha game analysis: throughput map, best-response solver,
// stability matrix, radio intensity metric (RIM), the Pareto (Jacobian)
// criterion and the steady-state and gain formulas of the SALE controller.
// Everything here is a pure function of its arguments.
namespace sale::analysis {

using MapVector = std::vector<double>;   // medium access probabilities q_i
using RateVector = std::vector<double>;  // throughputs / target rates

// theta_i = q_i * prod_{j ~ i} (1 - q_j).
RateVector Throughput(const InterferenceGraph& g, std::span<const double> q);

// One synchronous myopic best response:
// q'_i = min(y_i / prod_{j ~ i}(1 - q_j), 1), with 0/0 taken as 0.
MapVector BestResponseStep(const InterferenceGraph& g, std::span<const double> q,
                           std::span<const double> y);

enum class SolveOutcome { kConverged, kDivergedToOne, kMaxIterations };

struct SolveReport {
  SolveOutcome outcome = SolveOutcome::kMaxIterations;
  MapVector q;
  int iterations = 0;
};

// Any q_i at or above this counts as the dead-end q = 1.
inline constexpr double kDivergenceThreshold = 1.0 - 1e-12;

// Iterates BestResponseStep from q = 0. The iterates are componentwise
// nondecreasing, so a converged run ends at the least fixed point (the NE).
// `on_step`, when set, sees every iterate.
SolveReport SolveNash(const InterferenceGraph& g, std::span<const double> y,
                      double tol, int max_iter,
                      const std::function<void(std::span<const double>)>& on_step = {});

// C_ii = 2, C_ij = -a_ij q_i/(1-q_j) - a_ji q_j/(1-q_i). The NE is stable
// when C(q*) is positive definite. Throws std::domain_error if some q_i = 1.
Eigen::MatrixXd StabilityMatrix(const InterferenceGraph& g, std::span<const double> q);

// Cholesky without pivoting; every pivot must exceed `pivot_tol`.
// Throws std::invalid_argument for an asymmetric matrix.
bool IsPositiveDefinite(const Eigen::MatrixXd& c, double pivot_tol = 1e-12);

// R_i = sum_{j != i} a_ij q_i/(1-q_j) + a_ji q_j/(1-q_i). R_i < 2 for all i
// makes C(q) strictly diagonally dominant, hence positive definite.
double Rim(const InterferenceGraph& g, std::span<const double> q, int i);
std::vector<double> Rims(const InterferenceGraph& g, std::span<const double> q);

// D(q): determinant of the matrix with diagonal 1 - q_i and off-diagonal
// -a_ij q_i. det(J) of the throughput map equals D(q) times a factor that is
// strictly positive on (0,1)^N, so D(q) = 0 marks the Pareto front.
double JacobianDet(const InterferenceGraph& g, std::span<const double> q);

// Common MAP of an independent tree whose leader has degree n_l: 1/(n_l+1).
double SteadyStateSingle(int n_l);

// Analytic steady state of a leader partition. Each tree shares one MAP; each
// leader's value solves R_l = 2 given the MAPs of cross-tree neighbors.
// Dependent trees are solved in dependency order (bisection, 1e-10); cyclic
// dependencies are swept Gauss-Seidel style until the change is <= 1e-10.
// Throws std::runtime_error if sweeps do not settle within 10,000 rounds.
MapVector SolveSteadyState(const InterferenceGraph& g, const TreePartition& partition);

// d theta_l / d eps for a single-leader tree at R_l = 2 + eps.
double SensitivityAtRim(int n_l, double eps);

// Linearized plant gain at an independent leader: -2 (n_l+1)^2 / n_l.
double LeaderGain(int n_l);

// Operating point q' solving R' = 2 for a leader of degree n_l1 with one
// cross-tree neighbor fixed at q_m:
//   2(n_l1-1) q'/(1-q') + q'/(1-q_m) + q_m/(1-q') = 2.
double AffectedOperatingPoint(int n_l1, double q_m);

// Plant gain of such an affected leader at q_op:
//   -2(n_l1-1)/(1-q_op)^2 - 1/(1-q_m) - q_m/(1-q_op)^2.
double AffectedLeaderGain(int n_l1, double q_m, double q_op);

// d theta'_l1 / d eps at eps = 0 for the affected leader, i.e. the slope of
// q'(1-q')^(n_l1-1)(1-q_m) at q_op times -1/K'. Nonnegative means the leader
// still has throughput margin.
double AffectedLeaderSensitivity(int n_l1, double q_m);

// d theta_j / d q_l for a follower of degree n_j in a single-leader tree at
// q_l = 1/(n_l+1).
double FollowerThroughputSlope(int n_j, int n_l);

// Jury test on z^2 - [1 + K(Kp+Ki)] z + K Kp for the PI loop around an
// independent leader: -K(2Kp+Ki) < 2, Kp > 0, Ki > 0.
bool PiStabilityCheck(int n_l, double k_p, double k_i);

}  // namespace sale::analysis
