#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace pcn::patience {

/// Distribution of individual transaction values on either side of the channel.
class ValueDistribution {
 public:
  static ValueDistribution exponential(double mean);
  /// Density samples at x = 0, step, 2*step, ...; rescaled to unit mass.
  static ValueDistribution gridded(double step, std::vector<double> density);

  bool is_exponential() const { return exponential_; }
  double mean() const { return mean_; }
  double pdf(double x) const;
  double cdf(double x) const;
  double sample(std::mt19937_64& rng) const;

 private:
  ValueDistribution() = default;

  bool exponential_ = true;
  double mean_ = 1.0;
  double step_ = 0.0;
  std::vector<double> density_;
  std::vector<double> cumulative_;
};

/// A strategic A->B transaction of `value` waiting on an edge that currently
/// holds `capacity`, while Poisson traffic moves coins in both directions.
struct WaitModel {
  double lambda1 = 1.0;  ///< A->B arrival rate (drains the edge)
  double lambda2 = 1.0;  ///< B->A arrival rate (refills the edge)
  ValueDistribution values = ValueDistribution::exponential(1.0);
  double value = 1.0;
  double capacity = 0.0;

  double deficit() const { return value - capacity; }
};

/// Drift approximation (v-u)/((lambda2-lambda1)*mean): +inf when
/// lambda2 <= lambda1, 0 when the edge already has enough capacity.
double expected_wait(const WaitModel& model);

struct FirstPassageOptions {
  double epsilon = 1e-6;
  /// Grid step; 0 selects mean/50, nudged so the model's deficit is a grid point.
  double step = 0.0;
  /// Largest deficit of interest; 0 selects the model's deficit.
  double r_max = 0.0;
  /// Grid extension beyond r_max where phi is still tracked; 0 selects 30 means.
  double tail_span = 0.0;
  /// Fixed depth; 0 grows n until the largest increment on [0, r_max] is below epsilon.
  std::size_t n_max = 0;
  std::size_t n_cap = 4000;
  /// Recompute at half the step and throw GridTooCoarse if any tabulated
  /// value moves by more than 10 * epsilon.
  bool self_check = true;
};

/// phi(r, n): probability the deficit r is closed within the first n
/// B->A arrivals, tabulated on r = 0, h, 2h, ... for n = 1..depth().
struct FirstPassageTable {
  double step = 0.0;
  double epsilon = 0.0;
  double lambda2 = 0.0;
  double deficit = 0.0;
  double r_max = 0.0;
  /// Truncated weights p_m = lambda1^m lambda2 / (lambda1+lambda2)^(m+1).
  std::vector<double> mixing_weights;
  /// Mass of the dropped geometric tail, (lambda1/(lambda1+lambda2))^(M+1).
  double mixing_tail = 0.0;
  /// rows[n-1][k] = phi(k*step, n).
  std::vector<std::vector<double>> rows;

  std::size_t depth() const { return rows.size(); }
  std::size_t grid_size() const { return rows.empty() ? 0 : rows.front().size(); }
  /// phi(r, 0) = 0; linear interpolation between grid points; 0 off the grid.
  double phi(double r, std::size_t n) const;
};

FirstPassageTable first_passage(const WaitModel& model, const FirstPassageOptions& options = {});

struct WaitCdf {
  std::vector<double> t;
  std::vector<double> values;
};

/// Phi(t) = sum_n Pr{n-th B->A arrival <= t} (phi(r,n) - phi(r,n-1)) at the
/// table's deficit. A non-positive deficit gives 1 everywhere.
WaitCdf wait_cdf(const FirstPassageTable& table, std::span<const double> t_grid);
/// Same series at another deficit covered by the table.
WaitCdf wait_cdf(const FirstPassageTable& table, std::span<const double> t_grid, double deficit);

struct MonteCarloCdf {
  std::vector<double> t;
  std::vector<double> cdf;
  /// 95% normal-approximation binomial half-widths.
  std::vector<double> half_width;
  std::size_t runs = 0;
  std::size_t censored = 0;
  /// Runs that needed no wait because the capacity already covered the value.
  std::size_t immediate = 0;
  /// Over uncensored runs.
  double mean = 0.0;
  double mean_std_error = 0.0;
  /// passage_index_counts[n-1]: runs whose deficit closed at the n-th B->A arrival.
  std::vector<std::size_t> passage_index_counts;

  /// Fraction of all runs that closed within the first n B->A arrivals; the
  /// empirical counterpart of phi(r, n) when the horizon censors nothing.
  double within_arrivals(std::size_t n) const;
};

/// Direct simulation of the capacity process. Each run draws from its own
/// generator seeded from (seed, run index), so results do not depend on
/// evaluation order.
MonteCarloCdf mc_oracle(const WaitModel& model, std::size_t runs, double horizon, std::uint64_t seed,
                        std::span<const double> t_grid);

/// Evenly spaced points 0, t_max/(count-1), ..., t_max.
std::vector<double> linear_grid(double t_max, std::size_t count);

}  // namespace pcn::patience
