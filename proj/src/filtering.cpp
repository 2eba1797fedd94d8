#include "skelwarp/filtering.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <string>

#include "skelwarp/error.hpp"

namespace skelwarp {
namespace {

void check_odd_window(int window, const char* what) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorKind::InvalidWindow, std::string(what) +
                                              " window must be a positive odd "
                                              "integer, got " +
                                              std::to_string(window));
  }
}

// Row p of the returned matrix holds the weights that evaluate, at window
// position p, the degree-`order` least-squares fit over the whole window.
Eigen::MatrixXd savgol_weights(int window, int order) {
  const int half = window / 2;
  Eigen::MatrixXd vander(window, order + 1);
  for (int i = 0; i < window; ++i) {
    // Centered and scaled abscissa keeps the system well conditioned.
    const double t = half > 0 ? static_cast<double>(i - half) / half : 0.0;
    double power = 1.0;
    for (int d = 0; d <= order; ++d) {
      vander(i, d) = power;
      power *= t;
    }
  }
  // Hat matrix V (V^T V)^-1 V^T, computed through an orthogonal factorization.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(vander);
  const Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(window, order + 1);
  return q * q.transpose();
}

}  // namespace

void validate(const FilterParams& p) {
  check_odd_window(p.median_window, "median");
  check_odd_window(p.savgol_window, "Savitzky-Golay");
  if (p.savgol_window < 3 || p.median_window < 3) {
    throw Error(ErrorKind::InvalidWindow, "filter windows must be >= 3");
  }
  if (p.savgol_order < 0 || p.savgol_order >= p.savgol_window) {
    throw Error(ErrorKind::InvalidWindow,
                "Savitzky-Golay order must be in [0, window)");
  }
}

Signal median_filter(std::span<const double> x, int window) {
  check_odd_window(window, "median");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const std::ptrdiff_t half = window / 2;
  Signal out(x.size());
  std::vector<double> buf;
  buf.reserve(static_cast<std::size_t>(window));
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    // Symmetric truncation keeps the window centered on i.
    const std::ptrdiff_t reach = std::min({half, i, n - 1 - i});
    buf.assign(x.begin() + (i - reach), x.begin() + (i + reach + 1));
    auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
    std::nth_element(buf.begin(), mid, buf.end());
    out[static_cast<std::size_t>(i)] = *mid;
  }
  return out;
}

Signal savgol_filter(std::span<const double> x, int window, int order) {
  check_odd_window(window, "Savitzky-Golay");
  if (order < 0 || order >= window) {
    throw Error(ErrorKind::InvalidWindow,
                "Savitzky-Golay order must be in [0, window)");
  }
  if (x.size() < static_cast<std::size_t>(window)) {
    throw Error(ErrorKind::SignalTooShort,
                "signal of length " + std::to_string(x.size()) +
                    " is shorter than the Savitzky-Golay window " +
                    std::to_string(window));
  }
  const Eigen::MatrixXd weights = savgol_weights(window, order);
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const std::ptrdiff_t half = window / 2;
  Signal out(x.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t start = std::clamp(i - half, std::ptrdiff_t{0}, n - window);
    const auto row = static_cast<Eigen::Index>(i - start);
    double acc = 0.0;
    for (int j = 0; j < window; ++j) {
      acc += weights(row, j) * x[static_cast<std::size_t>(start + j)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

TrajectorySample smooth_sample(const TrajectorySample& s, const FilterParams& p) {
  validate(p);
  TrajectorySample out = s;
  for (auto& sig : out.sub_signals) {
    sig = median_filter(sig, p.median_window);
    if (sig.size() >= static_cast<std::size_t>(p.savgol_window)) {
      sig = savgol_filter(sig, p.savgol_window, p.savgol_order);
    }
  }
  return out;
}

}  // namespace skelwarp
