#include "slt/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slt/errors.hpp"
#include "slt/parallel.hpp"
#include "slt/rng.hpp"

namespace slt {

Directions sample_directions(int dim, std::uint64_t seed) {
  if (dim < 1) throw ConfigError("sample_directions: dim must be positive");
  Rng rng(seed);
  Directions d;
  d.d1.resize(static_cast<std::size_t>(dim));
  d.d2.resize(static_cast<std::size_t>(dim));
  for (double& x : d.d1) x = rng.normal();
  for (double& x : d.d2) x = rng.normal();
  return d;
}

namespace {

double block_norm(const double* p, int n) {
  double ss = 0.0;
  for (int i = 0; i < n; ++i) ss += p[i] * p[i];
  return std::sqrt(ss);
}

void scale_block(double* p, int n, double factor) {
  for (int i = 0; i < n; ++i) p[i] *= factor;
}

}  // namespace

void normalize_directions_per_block(std::vector<double>& d,
                                    const ParamVector& reference) {
  const NetworkArch& arch = reference.arch;
  const int wc = arch.weight_count();
  if (static_cast<int>(d.size()) != wc + arch.bias_count())
    throw ShapeError("direction length does not match parameter count");
  for (int l = 0; l < arch.layer_count(); ++l) {
    const int woff = arch.layer_weight_offset(l);
    const int wcnt = arch.layer_weight_count(l);
    const double wref = block_norm(reference.weights.data() + woff, wcnt);
    const double wcur = block_norm(d.data() + woff, wcnt);
    scale_block(d.data() + woff, wcnt, wcur > 0.0 ? wref / wcur : 0.0);

    const int boff = arch.layer_bias_offset(l);
    const int bcnt = arch.width(l + 1);
    const double bref = block_norm(reference.biases.data() + boff, bcnt);
    const double bcur = block_norm(d.data() + wc + boff, bcnt);
    scale_block(d.data() + wc + boff, bcnt, bcur > 0.0 ? bref / bcur : 0.0);
  }
}

void restrict_direction_to_active(std::vector<double>& d, const BitMask& mask) {
  if (static_cast<int>(d.size()) < mask.size())
    throw ShapeError("direction shorter than mask");
  for (int i = 0; i < mask.size(); ++i) {
    if (!mask.bits[static_cast<std::size_t>(i)]) d[static_cast<std::size_t>(i)] = 0.0;
  }
}

namespace {

ParamVector displaced(const ParamVector& w_s, const std::vector<double>& d1,
                      const std::vector<double>& d2, double delta, double eta) {
  const int wc = w_s.arch.weight_count();
  ParamVector w = w_s;
  for (std::size_t i = 0; i < w.weights.size(); ++i)
    w.weights[i] = w_s.weights[i] + delta * d1[i] + eta * d2[i];
  for (std::size_t i = 0; i < w.biases.size(); ++i)
    w.biases[i] = w_s.biases[i] + delta * d1[static_cast<std::size_t>(wc) + i] +
                  eta * d2[static_cast<std::size_t>(wc) + i];
  return w;
}

double metric_value(const ParamVector& w, LandscapeMetric metric,
                    const Dataset& data) {
  return metric == LandscapeMetric::Loss
             ? cross_entropy(MaskedNetwork(w), data)
             : accuracy(MaskedNetwork(w), data);
}

}  // namespace

LandscapeGrid landscape_grid(const ParamVector& w_s,
                             const std::vector<double>& d1,
                             const std::vector<double>& d2, double lo, double hi,
                             int resolution, LandscapeMetric metric,
                             const Dataset& data, int workers) {
  w_s.validate();
  data.validate();
  if (resolution < 2) throw ConfigError("landscape resolution must be >= 2");
  if (!(hi > lo)) throw ConfigError("landscape range must have hi > lo");
  const std::size_t dim =
      static_cast<std::size_t>(w_s.arch.weight_count() + w_s.arch.bias_count());
  if (d1.size() != dim || d2.size() != dim)
    throw ShapeError("direction length does not match parameter count");

  LandscapeGrid grid;
  grid.metric = metric;
  grid.deltas.resize(static_cast<std::size_t>(resolution));
  grid.etas.resize(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) {
    const double frac = static_cast<double>(i) / (resolution - 1);
    const double v = lo + frac * (hi - lo);
    grid.deltas[static_cast<std::size_t>(i)] = v;
    grid.etas[static_cast<std::size_t>(i)] = v;
  }
  // Pin the midpoint of a symmetric range to exactly 0 so the center cell is
  // the untranslated network.
  if (resolution % 2 == 1 && lo == -hi) {
    grid.deltas[static_cast<std::size_t>(resolution / 2)] = 0.0;
    grid.etas[static_cast<std::size_t>(resolution / 2)] = 0.0;
  }

  grid.values.resize(resolution, resolution);
  parallel_for(resolution * resolution, workers, [&](int cell) {
    const int i = cell / resolution;
    const int j = cell % resolution;
    const ParamVector w =
        displaced(w_s, d1, d2, grid.deltas[static_cast<std::size_t>(i)],
                  grid.etas[static_cast<std::size_t>(j)]);
    grid.values(i, j) = metric_value(w, metric, data);
  });
  return grid;
}

std::vector<double> hessian_vector_product(const ParamVector& params,
                                           const std::vector<double>& v,
                                           const Dataset& data,
                                           double eps_scale, double l2_alpha) {
  params.validate();
  const int wc = params.arch.weight_count();
  const std::size_t dim = static_cast<std::size_t>(wc + params.arch.bias_count());
  if (v.size() != dim) throw ShapeError("vector length does not match parameters");
  double vnorm = block_norm(v.data(), static_cast<int>(dim));
  if (!(vnorm > 0.0)) throw ConfigError("hessian_vector_product: zero vector");

  double wnorm = 0.0;
  for (double w : params.weights) wnorm += w * w;
  for (double b : params.biases) wnorm += b * b;
  wnorm = std::sqrt(wnorm);
  const double eps = eps_scale * (1.0 + wnorm);

  auto shifted = [&](double sign) {
    ParamVector w = params;
    const double step = sign * eps / vnorm;
    for (int i = 0; i < wc; ++i)
      w.weights[static_cast<std::size_t>(i)] += step * v[static_cast<std::size_t>(i)];
    for (std::size_t i = 0; i < w.biases.size(); ++i)
      w.biases[i] += step * v[static_cast<std::size_t>(wc) + i];
    return gradient(w, data, l2_alpha);
  };
  const std::vector<double> gp = shifted(1.0);
  const std::vector<double> gm = shifted(-1.0);

  std::vector<double> hv(dim);
  const double scale = vnorm / (2.0 * eps);
  for (std::size_t i = 0; i < dim; ++i) {
    hv[i] = (gp[i] - gm[i]) * scale;
    if (!std::isfinite(hv[i]))
      throw NumericsError("non-finite Hessian-vector product");
  }
  return hv;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

EigenProbe top_eigenvalues(const LinearOperator& op, int dim, int m,
                           int max_iters, double tol, std::uint64_t seed) {
  if (m < 1) throw ConfigError("top_eigenvalues: m must be positive");
  if (dim < 1) throw ConfigError("top_eigenvalues: dim must be positive");
  if (max_iters < 1) throw ConfigError("top_eigenvalues: max_iters must be positive");
  m = std::min(m, dim);

  EigenProbe probe;
  std::vector<std::vector<double>> basis;  // found eigenvectors
  int total_iters = 0;

  for (int k = 0; k < m; ++k) {
    double lambda = 0.0;
    std::vector<double> vec;
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart <= 3; ++restart) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(k * 17 + restart + 1)));
      std::vector<double> x(static_cast<std::size_t>(dim));
      for (double& xi : x) xi = rng.normal();
      bool broke_down = false;

      for (int it = 0; it < max_iters; ++it) {
        // Deflate: remove components along found eigenvectors.
        for (const auto& b : basis) {
          const double c = dot(x, b);
          for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * b[i];
        }
        const double xn = norm(x);
        if (!(xn > 1e-300) || !std::isfinite(xn)) {
          broke_down = true;
          break;
        }
        for (double& xi : x) xi /= xn;
        std::vector<double> hx = op(x);
        ++total_iters;
        lambda = dot(x, hx);  // Rayleigh quotient of the unit iterate
        double rr = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double r = hx[i] - lambda * x[i];
          rr += r * r;
        }
        residual = std::sqrt(rr);
        vec = x;
        if (residual <= tol) {
          converged = true;
          break;
        }
        x = std::move(hx);
      }
      if (!broke_down) break;
      if (restart == 3)
        throw NumericsError("power iteration broke down after 3 restarts");
    }

    // Normalize stored eigenvector for later deflation.
    const double vn = norm(vec);
    if (vn > 0.0)
      for (double& xi : vec) xi /= vn;
    basis.push_back(std::move(vec));
    probe.eigenvalues.push_back(lambda);
    probe.residuals.push_back(residual);
    probe.converged.push_back(converged);
  }

  // Largest magnitude first.
  std::vector<int> order(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(probe.eigenvalues[static_cast<std::size_t>(a)]) >
           std::abs(probe.eigenvalues[static_cast<std::size_t>(b)]);
  });
  EigenProbe sorted;
  sorted.iterations_used = total_iters;
  for (int i : order) {
    sorted.eigenvalues.push_back(probe.eigenvalues[static_cast<std::size_t>(i)]);
    sorted.residuals.push_back(probe.residuals[static_cast<std::size_t>(i)]);
    sorted.converged.push_back(probe.converged[static_cast<std::size_t>(i)]);
  }
  return sorted;
}

EigenProbe top_eigenvalues(const ParamVector& params, const Dataset& data,
                           int m, int max_iters, double tol, std::uint64_t seed,
                           double eps_scale, double l2_alpha) {
  const int dim = params.arch.weight_count() + params.arch.bias_count();
  LinearOperator op = [&](const std::vector<double>& v) {
    return hessian_vector_product(params, v, data, eps_scale, l2_alpha);
  };
  return top_eigenvalues(op, dim, m, max_iters, tol, seed);
}

}  // namespace slt
