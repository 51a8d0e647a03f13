#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lfp/support_set.hpp"

namespace lfp {

/// Finite-output observation channel P(Y = y_j | X = x). The output labels
/// are opaque to the solver; pmf/pmf_dx are pure and safe to call
/// concurrently once the channel is built.
struct Channel {
  std::vector<double> outputs;  // labels y_1 ... y_N
  int input_dim = 1;
  /// Asserts that the conditional mean depends on the prior only through the
  /// output marginal; affects only which cardinality bound is selected.
  bool t_compatible = false;
  std::function<double(int j, std::span<const double> x)> pmf;
  /// d pmf(j|x) / d x_l; empty when no derivative is available.
  std::function<double(int j, std::span<const double> x, int l)> pmf_dx;

  int alphabet_size() const { return static_cast<int>(outputs.size()); }
  bool has_derivative() const { return static_cast<bool>(pmf_dx); }
};

/// Binomial channel with m trials: outputs {0, ..., m}, success probability
/// x in [0, 1]. The x-derivative uses the expanded polynomial form, which is
/// finite at x in {0, 1}.
Channel binomial_channel(int m);

/// Uniform rounding quantizer with clipping applied to X + Z, Z standard
/// normal: outputs {-levels, ..., 0, ..., levels}, N = 2*levels + 1.
Channel quantized_gaussian_channel(int levels);

/// Channel tabulated on an x-grid with linear interpolation between grid
/// points (approximate; derivative is the interpolation slope).
Channel table_channel(std::vector<double> outputs, std::vector<double> grid_x,
                      std::vector<std::vector<double>> pmf_rows);

struct ChannelValidationReport {
  bool ok = true;
  double max_norm_err = 0.0;    // worst |sum_j pmf(j,x) - 1|
  std::vector<double> norm_err_x;
  double max_range_err = 0.0;   // worst excursion of pmf outside [0, 1]
  std::vector<double> range_err_x;
  double max_deriv_err = 0.0;   // worst |sum_j pmf_dx(j,x,l)|, 0 if no derivative
  std::vector<double> deriv_err_x;
  std::string summary() const;
};

/// Evaluates the normalization, range, and derivative-sum invariants on a
/// grid of grid_size points per coordinate over the support set.
ChannelValidationReport validate_channel(const Channel& ch,
                                         const SupportSet& support,
                                         int grid_size);

}  // namespace lfp
