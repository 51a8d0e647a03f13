#include "lfp/channel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "lfp/normal.hpp"

namespace lfp {
namespace {

// x^k by repeated multiplication; k is small and pow(0,0)=1 is wanted.
double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

std::vector<double> binomial_coefficients(int m) {
  std::vector<double> c(m + 1, 1.0);
  for (int y = 1; y <= m; ++y) {
    c[y] = c[y - 1] * static_cast<double>(m - y + 1) / static_cast<double>(y);
  }
  // Force exact symmetry of the table; the multiplicative recurrence is exact
  // only while the intermediates stay integral.
  for (int y = 0; y <= m / 2; ++y) c[m - y] = c[y];
  return c;
}

}  // namespace

Channel binomial_channel(int m) {
  if (m < 1) throw std::invalid_argument("binomial_channel: m must be >= 1");
  auto coeff = std::make_shared<std::vector<double>>(binomial_coefficients(m));

  Channel ch;
  ch.input_dim = 1;
  ch.t_compatible = false;
  ch.outputs.resize(m + 1);
  for (int y = 0; y <= m; ++y) ch.outputs[y] = static_cast<double>(y);

  ch.pmf = [m, coeff](int j, std::span<const double> x) {
    const double p = x[0];
    // Mirror onto p <= 1/2 so pmf(y, p) == pmf(m-y, 1-p) bit-for-bit
    // (1-p is exact for p in [1/2, 1]).
    int y = j;
    double q = p;
    if (p > 0.5) {
      y = m - j;
      q = 1.0 - p;
    }
    return (*coeff)[y] * ipow(q, y) * ipow(1.0 - q, m - y);
  };

  ch.pmf_dx = [m, coeff](int j, std::span<const double> x, int) {
    const double p = x[0];
    // Expanded polynomial form: C(m,y) [y p^{y-1} (1-p)^{m-y}
    // - (m-y) p^y (1-p)^{m-y-1}]; finite at p in {0, 1}.
    const int y = j;
    double term = 0.0;
    if (y > 0) term += y * ipow(p, y - 1) * ipow(1.0 - p, m - y);
    if (m - y > 0) term -= (m - y) * ipow(p, y) * ipow(1.0 - p, m - y - 1);
    return (*coeff)[y] * term;
  };
  return ch;
}

Channel quantized_gaussian_channel(int levels) {
  if (levels < 1) {
    throw std::invalid_argument("quantized_gaussian_channel: levels must be >= 1");
  }
  const int nq = levels;

  Channel ch;
  ch.input_dim = 1;
  ch.t_compatible = false;
  ch.outputs.resize(2 * nq + 1);
  for (int j = 0; j <= 2 * nq; ++j) ch.outputs[j] = static_cast<double>(j - nq);

  // Tail cells use one shared expression and the middle cells depend on x
  // only through |y - x|, so pmf(y, x) == pmf(-y, -x) holds bit-for-bit.
  ch.pmf = [nq](int j, std::span<const double> xs) {
    const double x = xs[0];
    const int y = j - nq;
    if (y == -nq) return normal_cdf(-x - nq + 0.5);
    if (y == nq) return normal_cdf(x - nq + 0.5);
    const double t = std::abs(y - x);
    return normal_cdf(-t + 0.5) - normal_cdf(-t - 0.5);
  };

  ch.pmf_dx = [nq](int j, std::span<const double> xs, int) {
    const double x = xs[0];
    const int y = j - nq;
    if (y == -nq) return -normal_pdf(-x - nq + 0.5);
    if (y == nq) return normal_pdf(x - nq + 0.5);
    const double t = y - x;
    return normal_pdf(t - 0.5) - normal_pdf(t + 0.5);
  };
  return ch;
}

Channel table_channel(std::vector<double> outputs, std::vector<double> grid_x,
                      std::vector<std::vector<double>> pmf_rows) {
  if (outputs.empty()) throw std::invalid_argument("table_channel: no outputs");
  if (grid_x.size() < 2) {
    throw std::invalid_argument("table_channel: grid_x needs at least 2 points");
  }
  if (!std::is_sorted(grid_x.begin(), grid_x.end())) {
    throw std::invalid_argument("table_channel: grid_x must be ascending");
  }
  if (pmf_rows.size() != outputs.size()) {
    throw std::invalid_argument("table_channel: pmf_rows count must match outputs");
  }
  for (const auto& row : pmf_rows) {
    if (row.size() != grid_x.size()) {
      throw std::invalid_argument("table_channel: each pmf row must match grid_x length");
    }
  }

  struct Table {
    std::vector<double> gx;
    std::vector<std::vector<double>> rows;
  };
  auto tab = std::make_shared<Table>(Table{std::move(grid_x), std::move(pmf_rows)});

  auto segment = [tab](double x) {
    const auto& gx = tab->gx;
    auto it = std::upper_bound(gx.begin(), gx.end(), x);
    long idx = std::distance(gx.begin(), it) - 1;
    idx = std::clamp<long>(idx, 0, static_cast<long>(gx.size()) - 2);
    return static_cast<std::size_t>(idx);
  };

  Channel ch;
  ch.input_dim = 1;
  ch.t_compatible = false;
  ch.outputs = std::move(outputs);
  ch.pmf = [tab, segment](int j, std::span<const double> xs) {
    const auto& gx = tab->gx;
    const double x = std::clamp(xs[0], gx.front(), gx.back());
    const std::size_t s = segment(x);
    const double w = (x - gx[s]) / (gx[s + 1] - gx[s]);
    const auto& row = tab->rows[j];
    return row[s] + w * (row[s + 1] - row[s]);
  };
  ch.pmf_dx = [tab, segment](int j, std::span<const double> xs, int) {
    const auto& gx = tab->gx;
    const double x = std::clamp(xs[0], gx.front(), gx.back());
    const std::size_t s = segment(x);
    const auto& row = tab->rows[j];
    return (row[s + 1] - row[s]) / (gx[s + 1] - gx[s]);
  };
  return ch;
}

std::string ChannelValidationReport::summary() const {
  std::ostringstream os;
  if (ok) {
    os << "ok";
    return os.str();
  }
  auto loc = [](const std::vector<double>& x) {
    std::ostringstream o;
    o << "(";
    for (std::size_t l = 0; l < x.size(); ++l) o << (l ? ", " : "") << x[l];
    o << ")";
    return o.str();
  };
  const bool norm_worst =
      max_norm_err >= max_range_err && max_norm_err >= max_deriv_err;
  if (norm_worst) {
    os << "normalization violated: max |sum pmf - 1| = " << max_norm_err
       << " at x = " << loc(norm_err_x);
  } else if (max_range_err >= max_deriv_err) {
    os << "range violated: pmf leaves [0,1] by " << max_range_err
       << " at x = " << loc(range_err_x);
  } else {
    os << "derivative sum violated: max |sum pmf_dx| = " << max_deriv_err
       << " at x = " << loc(deriv_err_x);
  }
  return os.str();
}

ChannelValidationReport validate_channel(const Channel& ch,
                                         const SupportSet& support,
                                         int grid_size) {
  if (grid_size < 1) {
    throw std::invalid_argument("validate_channel: grid_size must be >= 1");
  }
  const int n = support.dim();
  const BoxTarget bb = support.bounding_box();
  const int N = ch.alphabet_size();

  ChannelValidationReport rep;
  rep.norm_err_x.assign(n, 0.0);
  rep.range_err_x.assign(n, 0.0);
  rep.deriv_err_x.assign(n, 0.0);

  std::vector<int> idx(n, 0);
  std::vector<double> x(n);
  const long total = [&] {
    long t = 1;
    for (int l = 0; l < n; ++l) t *= grid_size;
    return t;
  }();

  for (long cell = 0; cell < total; ++cell) {
    long rem = cell;
    for (int l = 0; l < n; ++l) {
      idx[l] = static_cast<int>(rem % grid_size);
      rem /= grid_size;
      x[l] = grid_size == 1
                 ? 0.5 * (bb.lo[l] + bb.hi[l])
                 : bb.lo[l] + (bb.hi[l] - bb.lo[l]) * idx[l] / (grid_size - 1);
    }
    if (!support.contains(x, 1e-12)) continue;

    double sum = 0.0;
    for (int j = 0; j < N; ++j) {
      const double p = ch.pmf(j, x);
      sum += p;
      const double excess = std::max(0.0 - p, p - 1.0);
      if (excess > rep.max_range_err) {
        rep.max_range_err = excess;
        rep.range_err_x = x;
      }
    }
    if (std::abs(sum - 1.0) > rep.max_norm_err) {
      rep.max_norm_err = std::abs(sum - 1.0);
      rep.norm_err_x = x;
    }

    if (ch.has_derivative()) {
      for (int l = 0; l < n; ++l) {
        double dsum = 0.0;
        for (int j = 0; j < N; ++j) dsum += ch.pmf_dx(j, x, l);
        if (std::abs(dsum) > rep.max_deriv_err) {
          rep.max_deriv_err = std::abs(dsum);
          rep.deriv_err_x = x;
        }
      }
    }
  }

  rep.ok = rep.max_norm_err <= 1e-10 && rep.max_range_err <= 1e-12 &&
           rep.max_deriv_err <= 1e-8;
  return rep;
}

}  // namespace lfp
