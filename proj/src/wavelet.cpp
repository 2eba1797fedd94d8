#include "skelwarp/wavelet.hpp"

#include <algorithm>
#include <cctype>

namespace skelwarp {
namespace {

std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t r = i % period;
  if (r < 0) r += period;
  const auto ur = static_cast<std::size_t>(r);
  return ur < n ? ur : 2 * n - 1 - ur;
}

}  // namespace

int default_order(WaveletFamily family) noexcept {
  switch (family) {
    case WaveletFamily::Daubechies: return 4;
    case WaveletFamily::Coiflet: return 2;
    case WaveletFamily::Symlet: return 4;
  }
  return 4;
}

std::string_view short_name(WaveletFamily family) noexcept {
  switch (family) {
    case WaveletFamily::Daubechies: return "db";
    case WaveletFamily::Coiflet: return "coif";
    case WaveletFamily::Symlet: return "sym";
  }
  return "?";
}

std::string to_string(const WaveletSpec& spec) {
  return std::string(short_name(spec.family)) + std::to_string(spec.order) + "/" +
         std::to_string(spec.levels);
}

WaveletFamily parse_family(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "db" || lower == "daubechies") return WaveletFamily::Daubechies;
  if (lower == "coif" || lower == "coiflet") return WaveletFamily::Coiflet;
  if (lower == "sym" || lower == "symlet") return WaveletFamily::Symlet;
  throw Error(ErrorKind::InvalidArgument, "unknown wavelet family '" + lower + "'");
}

FilterBank analysis_filters(WaveletFamily family, int order) {
  const auto lo = scaling_filter(family, order);
  FilterBank bank;
  bank.low.assign(lo.begin(), lo.end());
  const std::size_t f = lo.size();
  bank.high.resize(f);
  // Quadrature mirror: high[k] = (-1)^(k+1) * low[F-1-k].
  for (std::size_t k = 0; k < f; ++k) {
    const double v = lo[f - 1 - k];
    bank.high[k] = (k % 2 == 0) ? -v : v;
  }
  return bank;
}

std::size_t stage_length(std::size_t n, std::size_t filter_length) noexcept {
  return (n + filter_length - 1) / 2;
}

Signal analysis_stage(std::span<const double> x, std::span<const double> filter) {
  const std::size_t n = x.size();
  const std::size_t f = filter.size();
  Signal out(stage_length(n, f), 0.0);
  for (std::size_t o = 0; o < out.size(); ++o) {
    const auto centre = static_cast<std::ptrdiff_t>(2 * o + 1);
    double acc = 0.0;
    for (std::size_t j = 0; j < f; ++j) {
      acc += filter[j] * x[reflect(centre - static_cast<std::ptrdiff_t>(j), n)];
    }
    out[o] = acc;
  }
  return out;
}

std::vector<Signal> wavedec(std::span<const double> x, const WaveletSpec& spec,
                            DepthPolicy policy) {
  if (spec.levels < 1) {
    throw Error(ErrorKind::InvalidArgument, "wavelet levels must be >= 1");
  }
  const FilterBank bank = analysis_filters(spec.family, spec.order);
  const auto levels = static_cast<std::size_t>(spec.levels);

  // details[0] is D_1.
  std::vector<Signal> details(levels);
  Signal approx(x.begin(), x.end());
  for (std::size_t level = 0; level < levels; ++level) {
    if (approx.size() < 2) {
      if (policy == DepthPolicy::Strict) {
        throw Error(ErrorKind::SignalTooShort,
                    "wavelet level " + std::to_string(level + 1) + " of " +
                        to_string(spec) + " receives " +
                        std::to_string(approx.size()) + " samples");
      }
      break;
    }
    details[level] = analysis_stage(approx, bank.high);
    approx = analysis_stage(approx, bank.low);
  }

  std::vector<Signal> out;
  out.reserve(levels + 1);
  out.push_back(std::move(approx));
  for (std::size_t level = levels; level-- > 0;) out.push_back(std::move(details[level]));
  return out;
}

std::vector<std::size_t> wavedec_lengths(std::size_t n, const WaveletSpec& spec,
                                         DepthPolicy policy) {
  const std::size_t f = scaling_filter(spec.family, spec.order).size();
  const auto levels = static_cast<std::size_t>(spec.levels);
  std::vector<std::size_t> details(levels, 0);
  std::size_t approx = n;
  for (std::size_t level = 0; level < levels; ++level) {
    if (approx < 2) {
      if (policy == DepthPolicy::Strict) {
        throw Error(ErrorKind::SignalTooShort, "signal too short for " + to_string(spec));
      }
      break;
    }
    approx = stage_length(approx, f);
    details[level] = approx;
  }
  std::vector<std::size_t> out{approx};
  for (std::size_t level = levels; level-- > 0;) out.push_back(details[level]);
  return out;
}

}  // namespace skelwarp
