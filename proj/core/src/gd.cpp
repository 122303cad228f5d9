#include "factlearn/gd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>

#include "factlearn/error.hpp"

namespace factlearn {

std::string_view to_string(AlphaSchedule schedule) {
  return schedule == AlphaSchedule::BoldDriver ? "bold" : "divide3";
}

AlphaSchedule parse_alpha_schedule(std::string_view text) {
  if (text == "divide3" || text == "DivideBy3OnIncrease") {
    return AlphaSchedule::DivideBy3OnIncrease;
  }
  if (text == "bold" || text == "BoldDriver") {
    return AlphaSchedule::BoldDriver;
  }
  throw ConfigError("unknown alpha schedule '" + std::string(text) + "' (expected divide3 or bold)");
}

void GdOptions::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("gd option ") + name + " must be positive");
    }
  };
  positive(alpha0, "alpha0");
  positive(alpha_floor, "alpha_floor");
  positive(epsilon, "epsilon");
  positive(lambda_ridge, "lambda_ridge");
  if (max_iters == 0) {
    throw ConfigError("gd option max_iters must be positive");
  }
  if (!(alpha_floor < alpha0)) {
    throw ConfigError("gd option alpha_floor must be smaller than alpha0");
  }
}

namespace {

template <typename Gradient>
GdResult descend(std::size_t dim, const GdOptions& options, std::uint64_t ops_per_iteration, Gradient gradient) {
  options.validate();
  if (dim < 2) {
    throw ConfigError("gradient descent needs at least one coefficient besides the label");
  }
  const auto start = std::chrono::steady_clock::now();
  GdResult result;
  result.theta.assign(dim, 0.0);
  result.theta[0] = -1.0;
  result.multiply_adds_per_iteration = ops_per_iteration;

  Theta& theta = result.theta;
  std::vector<double> g(dim, 0.0);
  double alpha = options.alpha0;
  double alpha_min = alpha;
  double previous = std::numeric_limits<double>::infinity();
  const double shrink = options.alpha_schedule == AlphaSchedule::BoldDriver ? 2.0 : 3.0;

  result.stop_reason = "max_iters";
  while (result.iterations < options.max_iters) {
    gradient(theta, g);
    double total = 0.0;
    for (std::size_t j = 1; j < dim; ++j) {
      g[j] += options.lambda_ridge * theta[j];
      if (!std::isfinite(g[j])) {
        throw NumericError("non-finite gradient at iteration " + std::to_string(result.iterations + 1) +
                           ", index " + std::to_string(j));
      }
      total += std::fabs(g[j]);
    }
    while (alpha * total > previous && alpha >= options.alpha_floor) {
      alpha /= shrink;
      ++result.alpha_decreases;
    }
    alpha_min = std::min(alpha_min, alpha);
    if (alpha < options.alpha_floor) {
      result.stop_reason = "alpha_floor";
      break;
    }
    for (std::size_t j = 1; j < dim; ++j) {
      theta[j] -= alpha * g[j];
      if (!std::isfinite(theta[j])) {
        throw NumericError("non-finite coefficient at iteration " + std::to_string(result.iterations + 1) +
                           ", index " + std::to_string(j));
      }
    }
    ++result.iterations;
    const double step = alpha * total;
    result.final_step = step;
    previous = step;
    if (step < options.epsilon) {
      result.converged = true;
      result.stop_reason = "converged";
      break;
    }
    if (options.alpha_schedule == AlphaSchedule::BoldDriver) {
      alpha *= 1.05;
    }
  }
  result.alpha_final = alpha;
  result.alpha_min = alpha_min;
  result.multiply_adds = result.iterations * ops_per_iteration;
  result.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// Dense row-major copy of the join: label, features, implicit 1 for the intercept.
struct DesignMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;
};

DesignMatrix design(const Relation& join, const FeatureOrder& features) {
  DesignMatrix out;
  out.rows = join.row_count();
  out.dim = features.size();
  out.values.assign(out.rows * out.dim, 1.0);
  for (std::size_t j = 0; j < features.n(); ++j) {
    const Column& column = join.column(features[j]);
    if (column.kind != AttributeKind::Numeric) {
      throw ConfigError("feature " + features[j] + " is not numeric in the join");
    }
    for (std::size_t r = 0; r < out.rows; ++r) {
      out.values[r * out.dim + j] = column.number_or_zero(r);
    }
  }
  return out;
}

void scan_gradient(const DesignMatrix& x, std::size_t begin, std::size_t end, std::span<const double> theta,
                   std::vector<double>& s) {
  s.assign(x.dim, 0.0);
  for (std::size_t r = begin; r < end; ++r) {
    const double* row = x.values.data() + r * x.dim;
    double h = 0.0;
    for (std::size_t k = 0; k < x.dim; ++k) {
      h += theta[k] * row[k];
    }
    for (std::size_t j = 0; j < x.dim; ++j) {
      s[j] += h * row[j];
    }
  }
}

void parallel_gradient(const DesignMatrix& x, unsigned threads, std::span<const double> theta,
                       std::vector<double>& out) {
  threads = std::max(1u, threads);
  if (threads == 1 || x.rows < 2 * threads) {
    scan_gradient(x, 0, x.rows, theta, out);
    return;
  }
  std::vector<std::vector<double>> partial(threads);
  std::vector<std::future<void>> pending;
  const std::size_t chunk = (x.rows + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(x.rows, t * chunk);
    const std::size_t end = std::min(x.rows, begin + chunk);
    pending.push_back(std::async(std::launch::async,
                                 [&, t, begin, end] { scan_gradient(x, begin, end, theta, partial[t]); }));
  }
  for (auto& p : pending) {
    p.get();
  }
  out.assign(x.dim, 0.0);
  for (const auto& p : partial) {
    for (std::size_t j = 0; j < x.dim; ++j) {
      out[j] += p[j];
    }
  }
}

}  // namespace

std::vector<double> cofactor_gradient(const CofactorMatrix& cofactors, std::span<const double> theta) {
  const std::size_t dim = cofactors.dim();
  if (theta.size() != dim) {
    throw ConfigError("theta has " + std::to_string(theta.size()) + " entries, expected " + std::to_string(dim));
  }
  std::vector<double> s(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = 0; k < dim; ++k) {
      s[j] += theta[k] * cofactors(k, j);
    }
  }
  return s;
}

std::vector<double> materialized_gradient(const Relation& join, const FeatureOrder& features,
                                          std::span<const double> theta) {
  if (theta.size() != features.size()) {
    throw ConfigError("theta has " + std::to_string(theta.size()) + " entries, expected " +
                      std::to_string(features.size()));
  }
  const DesignMatrix x = design(join, features);
  std::vector<double> s;
  scan_gradient(x, 0, x.rows, theta, s);
  return s;
}

GdResult bgd_cofactor(const CofactorMatrix& cofactors, const GdOptions& options) {
  const std::size_t dim = cofactors.dim();
  const std::uint64_t ops = (dim - 1) * dim + (dim - 1);
  return descend(dim, options, ops, [&](const Theta& theta, std::vector<double>& g) {
    for (std::size_t j = 1; j < dim; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        s += theta[k] * cofactors(k, j);
      }
      g[j] = s;
    }
  });
}

GdResult bgd_materialized(const Relation& join, const FeatureOrder& features, const GdOptions& options,
                          unsigned threads) {
  if (join.row_count() == 0) {
    throw NumericError("gradient is undefined on an empty join");
  }
  const DesignMatrix x = design(join, features);
  const std::uint64_t ops = static_cast<std::uint64_t>(x.rows) * (2 * x.dim) + (x.dim - 1);
  std::vector<double> s;
  return descend(x.dim, options, ops, [&](const Theta& theta, std::vector<double>& g) {
    parallel_gradient(x, threads, theta, s);
    std::copy(s.begin(), s.end(), g.begin());
  });
}

double predict(std::span<const double> theta, std::span<const double> features) {
  if (theta.size() < 2 || features.size() + 2 != theta.size()) {
    throw ConfigError("predict: " + std::to_string(features.size()) + " feature values for " +
                      std::to_string(theta.size()) + " coefficients");
  }
  double out = theta.back();
  for (std::size_t j = 0; j < features.size(); ++j) {
    out += theta[j + 1] * features[j];
  }
  return out;
}

}  // namespace factlearn
