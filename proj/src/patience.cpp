#include "pcn/patience.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pcn/errors.hpp"
#include "pcn/seed.hpp"

namespace pcn::patience {
namespace {

// Composite Simpson weights on k intervals (3/8 rule on the last three when k
// is odd, trapezoid for k == 1), without the factor h.
double simpson_weight(std::size_t k, std::size_t j) {
  if (k == 1) return 0.5;
  if (k % 2 == 1) {
    const std::size_t split = k - 3;
    double w = 0.0;
    if (split > 0 && j <= split) w += simpson_weight(split, j);
    if (j >= split) {
      const std::size_t o = j - split;
      w += (o == 0 || o == 3) ? 3.0 / 8.0 : 9.0 / 8.0;
    }
    return w;
  }
  if (j == 0 || j == k) return 1.0 / 3.0;
  return j % 2 == 1 ? 4.0 / 3.0 : 2.0 / 3.0;
}

// h * sum_j w_j f(j) over j = 0..k.
template <class F>
double simpson(std::size_t k, double h, F&& f) {
  if (k == 0) return 0.0;
  if (k == 1) return h * 0.5 * (f(0) + f(1));
  double sum = 0.0;
  if (k % 2 == 0) {
    sum += (f(0) + f(k)) / 3.0;
    for (std::size_t j = 1; j < k; ++j) sum += f(j) * (j % 2 == 1 ? 4.0 / 3.0 : 2.0 / 3.0);
    return h * sum;
  }
  const std::size_t split = k - 3;
  if (split > 0) {
    sum += (f(0) + f(split)) / 3.0;
    for (std::size_t j = 1; j < split; ++j) sum += f(j) * (j % 2 == 1 ? 4.0 / 3.0 : 2.0 / 3.0);
  }
  sum += (3.0 * f(split) + 9.0 * f(split + 1) + 9.0 * f(split + 2) + 3.0 * f(split + 3)) / 8.0;
  return h * sum;
}

double erlang_pdf(double z, std::size_t shape, double mean) {
  if (z < 0.0) return 0.0;
  if (z == 0.0) return shape == 1 ? 1.0 / mean : 0.0;
  const double m = static_cast<double>(shape);
  return std::exp((m - 1.0) * std::log(z) - z / mean - m * std::log(mean) - std::lgamma(m));
}

struct Grid {
  double step = 0.0;
  std::size_t in_range = 0;  // points with r <= r_max
  std::size_t size = 0;
};

// Builds phi rows on a fixed grid, either to a fixed depth or adaptively.
FirstPassageTable build_table(const WaitModel& model, const FirstPassageOptions& options, const Grid& grid,
                              std::size_t fixed_depth) {
  const double h = grid.step;
  const std::size_t n_points = grid.size;
  const ValueDistribution& dist = model.values;

  FirstPassageTable table;
  table.step = h;
  table.epsilon = options.epsilon;
  table.lambda2 = model.lambda2;
  table.deficit = model.deficit();
  table.r_max = static_cast<double>(grid.in_range - 1) * h;

  const double q = model.lambda1 / (model.lambda1 + model.lambda2);
  const double p0 = model.lambda2 / (model.lambda1 + model.lambda2);
  std::size_t last_m = 0;
  while (std::pow(q, static_cast<double>(last_m + 1)) >= options.epsilon) ++last_m;
  for (std::size_t m = 0; m <= last_m; ++m) table.mixing_weights.push_back(p0 * std::pow(q, static_cast<double>(m)));
  table.mixing_tail = std::pow(q, static_cast<double>(last_m + 1));

  std::vector<double> density(n_points);
  std::vector<double> survival(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double y = static_cast<double>(k) * h;
    density[k] = dist.pdf(y);
    survival[k] = 1.0 - dist.cdf(y);
  }

  // Continuous part of the A->B total between consecutive B->A arrivals:
  // sum over m >= 1 of p_m times the m-fold convolution density. The m = 0
  // term is an atom at zero with mass p_0.
  std::vector<double> mixture(n_points, 0.0);
  if (last_m >= 1) {
    if (dist.is_exponential()) {
      for (std::size_t m = 1; m <= last_m; ++m) {
        for (std::size_t k = 0; k < n_points; ++k) {
          mixture[k] += table.mixing_weights[m] * erlang_pdf(static_cast<double>(k) * h, m, dist.mean());
        }
      }
    } else {
      std::vector<double> fold = density;
      for (std::size_t m = 1; m <= last_m; ++m) {
        for (std::size_t k = 0; k < n_points; ++k) mixture[k] += table.mixing_weights[m] * fold[k];
        if (m == last_m) break;
        std::vector<double> next(n_points);
        for (std::size_t k = 0; k < n_points; ++k) {
          next[k] = simpson(k, h, [&](std::size_t j) { return fold[k - j] * density[j]; });
        }
        fold = std::move(next);
      }
    }
  }

  const std::size_t target = static_cast<std::size_t>(std::llround(std::max(table.deficit, 0.0) / h));
  std::vector<double> previous(n_points, 0.0);
  std::vector<double> passed(n_points);
  const std::size_t depth_limit = fixed_depth > 0 ? fixed_depth : options.n_cap;

  for (std::size_t n = 1; n <= depth_limit; ++n) {
    // passed(y): the next B->A arrival closes a deficit y, or leaves a
    // residual that closes within the n-1 arrivals after it.
    for (std::size_t k = 0; k < n_points; ++k) {
      double later = 0.0;
      if (n > 1) later = simpson(k, h, [&](std::size_t j) { return previous[k - j] * density[j]; });
      passed[k] = survival[k] + later;
    }
    std::vector<double> row(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
      const std::size_t span = n_points - 1 - i;
      const double spread = simpson(span, h, [&](std::size_t j) { return passed[i + j] * mixture[j]; });
      row[i] = std::clamp(p0 * passed[i] + spread, 0.0, 1.0);
    }
    // Quadrature and truncation noise (below epsilon) can break the
    // monotonicity in n and in r; project it away.
    if (n > 1) {
      for (std::size_t i = 0; i < n_points; ++i) row[i] = std::max(row[i], previous[i]);
    }
    for (std::size_t i = 1; i < n_points; ++i) row[i] = std::min(row[i], row[i - 1]);

    double increment = 0.0;
    for (std::size_t i = 0; i < grid.in_range; ++i) increment = std::max(increment, row[i] - previous[i]);
    increment = std::max(increment, row[std::min(target, n_points - 1)] - previous[std::min(target, n_points - 1)]);
    table.rows.push_back(row);
    previous = std::move(row);
    if (fixed_depth == 0 && n > 1 && increment < options.epsilon) break;
  }
  return table;
}

Grid make_grid(const WaitModel& model, const FirstPassageOptions& options, double step) {
  const double mean = model.values.mean();
  const double r_max = std::max({options.r_max, model.deficit(), 0.0});
  const double tail = options.tail_span > 0.0 ? options.tail_span : 30.0 * mean;
  Grid grid;
  grid.step = step;
  grid.in_range = static_cast<std::size_t>(std::ceil(r_max / step - 1e-9)) + 1;
  grid.size = grid.in_range + static_cast<std::size_t>(std::ceil(tail / step));
  return grid;
}

// Pr{Poisson(x) >= n} for n = 1, 2, ... until the tail falls below epsilon.
std::vector<double> poisson_tails(double x, double epsilon, std::size_t limit) {
  std::vector<double> tails;
  if (x <= 0.0) return tails;
  double below = 0.0;  // Pr{Poisson(x) < n}
  for (std::size_t n = 1; n <= limit; ++n) {
    const double j = static_cast<double>(n - 1);
    below += std::exp(-x + j * std::log(x) - std::lgamma(j + 1.0));
    const double tail = std::max(0.0, 1.0 - below);
    tails.push_back(tail);
    if (tail < epsilon && j > x) break;
  }
  return tails;
}

void check_model(const WaitModel& model) {
  if (!(model.lambda1 > 0.0) || !(model.lambda2 > 0.0)) throw InvalidArgument("arrival rates must be positive");
  if (!std::isfinite(model.value) || !std::isfinite(model.capacity)) throw InvalidArgument("non-finite value or capacity");
}

}  // namespace

ValueDistribution ValueDistribution::exponential(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) throw InvalidArgument("exponential mean must be positive");
  ValueDistribution d;
  d.exponential_ = true;
  d.mean_ = mean;
  return d;
}

ValueDistribution ValueDistribution::gridded(double step, std::vector<double> density) {
  if (!(step > 0.0)) throw InvalidArgument("density step must be positive");
  if (density.size() < 2) throw InvalidArgument("density needs at least two samples");
  for (double v : density) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("density samples must be finite and non-negative");
  }
  ValueDistribution d;
  d.exponential_ = false;
  d.step_ = step;
  d.cumulative_.assign(density.size(), 0.0);
  for (std::size_t k = 1; k < density.size(); ++k) {
    d.cumulative_[k] = d.cumulative_[k - 1] + 0.5 * step * (density[k - 1] + density[k]);
  }
  const double mass = d.cumulative_.back();
  if (!(mass > 0.0)) throw InvalidArgument("density has zero mass");
  for (double& v : density) v /= mass;
  for (double& c : d.cumulative_) c /= mass;
  d.density_ = std::move(density);
  double first_moment = 0.0;
  for (std::size_t k = 1; k < d.density_.size(); ++k) {
    const double x0 = static_cast<double>(k - 1) * step;
    const double x1 = static_cast<double>(k) * step;
    first_moment += 0.5 * step * (x0 * d.density_[k - 1] + x1 * d.density_[k]);
  }
  d.mean_ = first_moment;
  return d;
}

double ValueDistribution::pdf(double x) const {
  if (x < 0.0) return 0.0;
  if (exponential_) return std::exp(-x / mean_) / mean_;
  const double pos = x / step_;
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= density_.size()) return k + 1 == density_.size() && pos == static_cast<double>(k) ? density_.back() : 0.0;
  const double frac = pos - static_cast<double>(k);
  return density_[k] * (1.0 - frac) + density_[k + 1] * frac;
}

double ValueDistribution::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (exponential_) return -std::expm1(-x / mean_);
  const double pos = x / step_;
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= cumulative_.size()) return 1.0;
  const double frac = pos - static_cast<double>(k);
  // Exact integral of the linear density over [k*step, x].
  const double d0 = density_[k];
  const double d1 = density_[k + 1];
  const double dx = frac * step_;
  return cumulative_[k] + dx * d0 + 0.5 * dx * frac * (d1 - d0);
}

double ValueDistribution::sample(std::mt19937_64& rng) const {
  if (exponential_) return std::exponential_distribution<double>(1.0 / mean_)(rng);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return static_cast<double>(cumulative_.size() - 1) * step_;
  const auto k = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  // Invert the piecewise-quadratic CDF on [k*step, (k+1)*step].
  const double d0 = density_[k];
  const double d1 = density_[k + 1];
  const double need = u - cumulative_[k];
  const double slope = (d1 - d0) / step_;
  double dx = 0.0;
  if (std::abs(slope) < 1e-12) {
    dx = d0 > 0.0 ? need / d0 : 0.0;
  } else {
    const double disc = std::max(0.0, d0 * d0 + 2.0 * slope * need);
    dx = (std::sqrt(disc) - d0) / slope;
  }
  return static_cast<double>(k) * step_ + std::clamp(dx, 0.0, step_);
}

double expected_wait(const WaitModel& model) {
  check_model(model);
  if (model.deficit() <= 0.0) return 0.0;
  if (model.lambda2 <= model.lambda1) return std::numeric_limits<double>::infinity();
  return model.deficit() / ((model.lambda2 - model.lambda1) * model.values.mean());
}

double FirstPassageTable::phi(double r, std::size_t n) const {
  if (n == 0) return 0.0;
  if (n > rows.size()) n = rows.size();
  if (rows.empty() || r < 0.0) return rows.empty() ? 0.0 : (r < 0.0 ? 1.0 : 0.0);
  const std::vector<double>& row = rows[n - 1];
  const double pos = r / step;
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= row.size()) return k + 1 == row.size() ? row.back() : 0.0;
  const double frac = pos - static_cast<double>(k);
  return row[k] * (1.0 - frac) + row[k + 1] * frac;
}

FirstPassageTable first_passage(const WaitModel& model, const FirstPassageOptions& options) {
  check_model(model);
  if (!(options.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  const double mean = model.values.mean();
  double step = options.step > 0.0 ? options.step : mean / 50.0;
  if (model.deficit() > 0.0) {
    // Put the deficit itself on the grid.
    step = model.deficit() / std::ceil(model.deficit() / step - 1e-9);
  }

  const Grid coarse = make_grid(model, options, step);
  FirstPassageTable table = build_table(model, options, coarse, options.n_max);

  if (options.self_check) {
    Grid fine = coarse;
    fine.step = step / 2.0;
    fine.in_range = 2 * (coarse.in_range - 1) + 1;
    fine.size = 2 * (coarse.size - 1) + 1;
    const FirstPassageTable refined = build_table(model, options, fine, table.depth());
    double worst = 0.0;
    for (std::size_t n = 1; n <= table.depth(); ++n) {
      const auto coarse_row = table.rows[n - 1];
      const auto& fine_row = refined.rows[n - 1];
      for (std::size_t k = 0; k < coarse.in_range; ++k) worst = std::max(worst, std::abs(coarse_row[k] - fine_row[2 * k]));
    }
    if (worst > 10.0 * options.epsilon) {
      throw GridTooCoarse("halving the grid step moved phi by " + std::to_string(worst) + " (limit " +
                          std::to_string(10.0 * options.epsilon) + ")");
    }
  }
  return table;
}

WaitCdf wait_cdf(const FirstPassageTable& table, std::span<const double> t_grid) {
  return wait_cdf(table, t_grid, table.deficit);
}

WaitCdf wait_cdf(const FirstPassageTable& table, std::span<const double> t_grid, double deficit) {
  WaitCdf out;
  out.t.assign(t_grid.begin(), t_grid.end());
  out.values.reserve(t_grid.size());
  for (double t : t_grid) {
    if (deficit <= 0.0) {
      out.values.push_back(1.0);
      continue;
    }
    double total = 0.0;
    const std::vector<double> tails = poisson_tails(table.lambda2 * t, table.epsilon, table.depth());
    for (std::size_t n = 1; n <= tails.size(); ++n) {
      total += tails[n - 1] * (table.phi(deficit, n) - table.phi(deficit, n - 1));
    }
    out.values.push_back(std::clamp(total, 0.0, 1.0));
  }
  return out;
}

MonteCarloCdf mc_oracle(const WaitModel& model, std::size_t runs, double horizon, std::uint64_t seed,
                        std::span<const double> t_grid) {
  check_model(model);
  if (runs == 0) throw InvalidArgument("runs must be at least 1");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");

  const double total_rate = model.lambda1 + model.lambda2;
  const double refill_probability = model.lambda2 / total_rate;
  std::vector<double> samples;
  samples.reserve(runs);
  std::size_t censored = 0;
  std::vector<std::size_t> passage_counts;
  std::size_t immediate = 0;

  for (std::size_t run = 0; run < runs; ++run) {
    double deficit = model.deficit();
    if (deficit <= 0.0) {
      samples.push_back(0.0);
      ++immediate;
      continue;
    }
    std::mt19937_64 rng(derive_seed(seed, run));
    std::exponential_distribution<double> gap(total_rate);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    double t = 0.0;
    std::size_t refills = 0;
    for (;;) {
      t += gap(rng);
      if (t > horizon) {
        ++censored;
        break;
      }
      const bool refill = coin(rng) < refill_probability;
      const double amount = model.values.sample(rng);
      if (refill) {
        ++refills;
        deficit -= amount;
        if (deficit <= 0.0) {
          samples.push_back(t);
          if (passage_counts.size() < refills) passage_counts.resize(refills, 0);
          ++passage_counts[refills - 1];
          break;
        }
      } else {
        deficit += amount;
      }
    }
  }

  MonteCarloCdf out;
  out.runs = runs;
  out.censored = censored;
  out.immediate = immediate;
  out.passage_index_counts = std::move(passage_counts);
  std::sort(samples.begin(), samples.end());
  out.t.assign(t_grid.begin(), t_grid.end());
  const double n = static_cast<double>(runs);
  for (double t : t_grid) {
    const auto hits = static_cast<double>(std::upper_bound(samples.begin(), samples.end(), t) - samples.begin());
    const double p = hits / n;
    out.cdf.push_back(p);
    out.half_width.push_back(1.96 * std::sqrt(p * (1.0 - p) / n));
  }
  if (!samples.empty()) {
    const double count = static_cast<double>(samples.size());
    out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / count;
    double sq = 0.0;
    for (double s : samples) sq += (s - out.mean) * (s - out.mean);
    out.mean_std_error = samples.size() > 1 ? std::sqrt(sq / (count - 1.0) / count) : 0.0;
  }
  return out;
}

double MonteCarloCdf::within_arrivals(std::size_t n) const {
  if (runs == 0) return 0.0;
  std::size_t hits = immediate;
  for (std::size_t k = 0; k < std::min(n, passage_index_counts.size()); ++k) hits += passage_index_counts[k];
  return static_cast<double>(hits) / static_cast<double>(runs);
}

std::vector<double> linear_grid(double t_max, std::size_t count) {
  std::vector<double> grid;
  if (count == 0) return grid;
  if (count == 1) return {t_max};
  for (std::size_t k = 0; k < count; ++k) {
    grid.push_back(t_max * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  return grid;
}

}  // namespace pcn::patience
