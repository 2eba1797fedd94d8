#include "skelwarp/dtw.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "skelwarp/error.hpp"

namespace skelwarp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_nonempty(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::EmptySequence, "DTW requires non-empty sequences");
  }
}

std::size_t effective_band(std::size_t n, std::size_t m, const DtwOptions& o) {
  if (!o.band) return std::max(n, m);
  const std::size_t diff = n > m ? n - m : m - n;
  return std::max(*o.band, diff);
}

bool in_band(std::size_t i, std::size_t j, std::size_t band) {
  return (i > j ? i - j : j - i) <= band;
}

double sq(double v) { return v * v; }

}  // namespace

DtwResult dtw(std::span<const double> a, std::span<const double> b,
              const DtwOptions& options) {
  check_nonempty(a, b);
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t band = effective_band(n, m, options);
  const std::size_t stride = m + 1;

  // acc[i * stride + j]: cheapest path from (1,1) to (i,j), 1-based.
  std::vector<double> acc((n + 1) * stride, kInf);
  acc[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      if (!in_band(i, j, band)) continue;
      const double best = std::min({acc[(i - 1) * stride + (j - 1)],
                                    acc[(i - 1) * stride + j],
                                    acc[i * stride + (j - 1)]});
      acc[i * stride + j] = sq(a[i - 1] - b[j - 1]) + best;
    }
  }

  DtwResult result;
  result.distance = acc[n * stride + m];
  std::size_t i = n;
  std::size_t j = m;
  while (true) {
    result.path.source.push_back(i - 1);
    result.path.base.push_back(j - 1);
    if (i == 1 && j == 1) break;
    const double diag = acc[(i - 1) * stride + (j - 1)];
    const double up = acc[(i - 1) * stride + j];
    const double left = acc[i * stride + (j - 1)];
    if (diag <= up && diag <= left) {
      --i;
      --j;
    } else if (up <= left) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(result.path.source.begin(), result.path.source.end());
  std::reverse(result.path.base.begin(), result.path.base.end());
  return result;
}

double dtw_distance(std::span<const double> a, std::span<const double> b,
                    const DtwOptions& options) {
  check_nonempty(a, b);
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t band = effective_band(n, m, options);
  std::vector<double> prev(m + 1, kInf);
  std::vector<double> cur(m + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = kInf;
    for (std::size_t j = 1; j <= m; ++j) {
      if (!in_band(i, j, band)) {
        cur[j] = kInf;
        continue;
      }
      cur[j] = sq(a[i - 1] - b[j - 1]) + std::min({prev[j - 1], prev[j], cur[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

Signal warp_signal(std::span<const double> source, std::span<const double> base,
                   const DtwOptions& options) {
  return warp_along(source, dtw(source, base, options).path, base.size());
}

Signal warp_along(std::span<const double> source, const WarpingPath& path,
                  std::size_t base_length) {
  const std::size_t len = base_length;
  Signal sum(len, 0.0);
  std::vector<std::size_t> count(len, 0);
  for (std::size_t p = 0; p < path.size(); ++p) {
    sum[path.base[p]] += source[path.source[p]];
    ++count[path.base[p]];
  }

  Signal out(len, 0.0);
  for (std::size_t l = 0; l < len; ++l) {
    if (count[l] > 0) out[l] = sum[l] / static_cast<double>(count[l]);
  }
  // Unmatched indices: interpolate between the nearest matched neighbours.
  for (std::size_t l = 0; l < len; ++l) {
    if (count[l] > 0) continue;
    std::optional<std::size_t> lo;
    std::optional<std::size_t> hi;
    for (std::size_t k = l; k-- > 0;) {
      if (count[k] > 0) {
        lo = k;
        break;
      }
    }
    for (std::size_t k = l + 1; k < len; ++k) {
      if (count[k] > 0) {
        hi = k;
        break;
      }
    }
    if (lo && hi) {
      const double w = static_cast<double>(l - *lo) / static_cast<double>(*hi - *lo);
      out[l] = (1.0 - w) * out[*lo] + w * out[*hi];
    } else if (lo) {
      out[l] = out[*lo];
    } else if (hi) {
      out[l] = out[*hi];
    }
  }
  return out;
}

TrajectorySample warp(const TrajectorySample& s, const MultiSignal& base,
                      const DtwOptions& options) {
  if (s.dimension() != base.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "cannot warp a sample with K=" + std::to_string(s.dimension()) +
                    " onto a base with K=" + std::to_string(base.size()));
  }
  TrajectorySample out = s;
  for (std::size_t k = 0; k < base.size(); ++k) {
    out.sub_signals[k] = warp_signal(s.sub_signals[k], base[k], options);
  }
  return out;
}

std::size_t unmatched_base_indices(const WarpingPath& path, std::size_t base_length) {
  std::vector<bool> seen(base_length, false);
  for (std::size_t q : path.base) {
    if (q < base_length) seen[q] = true;
  }
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), false));
}

}  // namespace skelwarp
