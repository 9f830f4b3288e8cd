#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "slt/dataset.hpp"
#include "slt/network.hpp"

namespace slt {

enum class LandscapeMetric { Loss, Accuracy };

// Two random directions over the full flat parameter vector
// [weights..., biases...].
struct Directions {
  std::vector<double> d1;
  std::vector<double> d2;
};

// Independent standard-normal vectors of the given dimension; d1 is drawn
// fully before d2.
Directions sample_directions(int dim, std::uint64_t seed);

// Rescales each layer's weight block and each layer's bias block of d to the
// norm of the matching block of reference. Blocks whose reference norm is
// zero are zeroed.
void normalize_directions_per_block(std::vector<double>& d,
                                    const ParamVector& reference);

// Zeroes the weight coordinates of d wherever the mask bit is 0; bias
// coordinates are untouched.
void restrict_direction_to_active(std::vector<double>& d, const BitMask& mask);

struct LandscapeGrid {
  std::vector<double> deltas;
  std::vector<double> etas;
  Eigen::MatrixXd values;  // |deltas| x |etas|
  LandscapeMetric metric = LandscapeMetric::Loss;
  std::uint64_t d1_seed = 0;
  std::uint64_t d2_seed = 0;
};

// values(i, j) = metric at w_s + deltas[i]*d1 + etas[j]*d2, every cell
// evaluated on the full dataset with the same code path, so the center cell
// of a symmetric range equals the direct metric of w_s bit for bit.
// resolution must be >= 2; odd resolutions place 0 exactly on a symmetric
// range. Cells evaluate independently across `workers` threads.
LandscapeGrid landscape_grid(const ParamVector& w_s,
                             const std::vector<double>& d1,
                             const std::vector<double>& d2, double lo, double hi,
                             int resolution, LandscapeMetric metric,
                             const Dataset& data, int workers = 1);

// Central-difference Hessian-vector product on the analytic gradient:
// Hv ~ (grad(w + eps*vhat) - grad(w - eps*vhat)) / (2*eps) * ||v||,
// eps = eps_scale * (1 + ||w||). The loss is mean cross-entropy plus an
// optional (l2_alpha/2)*||W||^2 term.
std::vector<double> hessian_vector_product(const ParamVector& params,
                                           const std::vector<double>& v,
                                           const Dataset& data,
                                           double eps_scale = 1e-4,
                                           double l2_alpha = 0.0);

struct EigenProbe {
  std::vector<double> eigenvalues;  // descending |lambda|
  int iterations_used = 0;
  std::vector<double> residuals;  // ||Hv - lambda v|| / ||v|| per eigenvalue
  std::vector<bool> converged;
};

using LinearOperator =
    std::function<std::vector<double>(const std::vector<double>&)>;

// Power iteration with deflation against previously found eigenvectors.
// Returns the m largest-magnitude eigenvalues of the symmetric operator.
// Breakdown (vanishing iterate) restarts with a reseeded vector, at most 3
// times, then throws NumericsError.
EigenProbe top_eigenvalues(const LinearOperator& op, int dim, int m,
                           int max_iters, double tol, std::uint64_t seed = 0);

// Same probe on the finite-difference Hessian of the loss at params.
EigenProbe top_eigenvalues(const ParamVector& params, const Dataset& data,
                           int m, int max_iters, double tol,
                           std::uint64_t seed = 0, double eps_scale = 1e-4,
                           double l2_alpha = 0.0);

}  // namespace slt
