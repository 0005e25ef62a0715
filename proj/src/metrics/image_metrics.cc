#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "arthro/error.h"
#include "arthro/metrics.h"

namespace arthro {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

void check_pair(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
    throw Error(ErrorCategory::kInput, "image dimensions differ",
                {{"a", std::to_string(a.width) + "x" + std::to_string(a.height) + "x" + std::to_string(a.channels)},
                 {"b", std::to_string(b.width) + "x" + std::to_string(b.height) + "x" + std::to_string(b.channels)}});
  }
  const std::size_t expected = static_cast<std::size_t>(a.width) * a.height * a.channels;
  if (a.data.size() != expected || b.data.size() != expected) {
    throw Error(ErrorCategory::kInput, "image buffer size does not match its dimensions");
  }
}

std::array<double, kWindow> gaussian_kernel() {
  std::array<double, kWindow> k{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double x = i - kWindow / 2;
    k[i] = std::exp(-x * x / (2.0 * kSigma * kSigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Valid-region separable Gaussian filter of a w x h plane.
std::vector<double> filter_valid(const std::vector<double>& in, int w, int h) {
  static const auto k = gaussian_kernel();
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < kWindow; ++i) s += k[i] * in[static_cast<std::size_t>(y) * w + x + i];
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < kWindow; ++i) s += k[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

std::vector<double> luminance(const Image& img) {
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  std::vector<double> out(n);
  if (img.channels == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = img.data[i];
  } else if (img.channels == 3) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] + 0.114 * img.data[3 * i + 2];
    }
  } else {
    throw Error(ErrorCategory::kInput, "images must have 1 or 3 channels");
  }
  return out;
}

double psnr(const Image& a, const Image& b) {
  check_pair(a, b);
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const std::int64_t d = static_cast<std::int64_t>(a.data[i]) - b.data[i];
    sum += static_cast<std::uint64_t>(d * d);
  }
  if (sum == 0) return std::numeric_limits<double>::infinity();
  const double mse = static_cast<double>(sum) / static_cast<double>(a.data.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const Image& a, const Image& b) {
  check_pair(a, b);
  if (a.width < kWindow || a.height < kWindow) {
    throw Error(ErrorCategory::kInput, "image smaller than the 11x11 SSIM window");
  }
  const int w = a.width;
  const int h = a.height;
  const std::vector<double> la = luminance(a);
  const std::vector<double> lb = luminance(b);
  std::vector<double> aa(la.size()), bb(la.size()), ab(la.size());
  for (std::size_t i = 0; i < la.size(); ++i) {
    aa[i] = la[i] * la[i];
    bb[i] = lb[i] * lb[i];
    ab[i] = la[i] * lb[i];
  }
  const auto mu_a = filter_valid(la, w, h);
  const auto mu_b = filter_valid(lb, w, h);
  const auto e_aa = filter_valid(aa, w, h);
  const auto e_bb = filter_valid(bb, w, h);
  const auto e_ab = filter_valid(ab, w, h);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
    const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
    const double cov = e_ab[i] - mu_a[i] * mu_b[i];
    const double num = (2.0 * mu_a[i] * mu_b[i] + kC1) * (2.0 * cov + kC2);
    const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1) * (var_a + var_b + kC2);
    total += num / den;
  }
  return total / static_cast<double>(mu_a.size());
}

}  // namespace arthro
