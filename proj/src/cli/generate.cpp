#include "unfold/cli/generate.hpp"

#include "unfold/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace unfold::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kImageSide = 16;

struct Sampler {
  explicit Sampler(unsigned long long seed) : rng(seed) {}
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
  std::mt19937_64 rng;
};

void add_noise(DataMatrix& Y, double noise, Sampler& s) {
  if (noise <= 0.0) return;
  for (Index i = 0; i < Y.rows(); ++i) {
    for (Index j = 0; j < Y.cols(); ++j) Y(i, j) += noise * s.normal();
  }
}

}  // namespace

const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names{"swiss_roll", "circle_images_proxy", "ring", "s_curve"};
  return names;
}

Dataset generate(const std::string& name, Index n, double noise, unsigned long long seed) {
  if (n < 10) throw InvalidArgument("generate: n must be at least 10");
  if (noise < 0.0) throw InvalidArgument("generate: noise must be nonnegative");
  Sampler s(seed);
  Dataset ds;
  ds.name = name;
  ds.labels.resize(static_cast<std::size_t>(n));

  if (name == "swiss_roll") {
    ds.Y.resize(n, 3);
    ds.truth.resize(n, 2);
    for (Index i = 0; i < n; ++i) {
      const double t = 1.5 * kPi * (1.0 + s.uniform());
      const double h = 10.0 * s.uniform();
      ds.Y.row(i) << t * std::cos(t), h, t * std::sin(t);
      ds.truth.row(i) << t, h;
      ds.labels[static_cast<std::size_t>(i)] = t;
    }
  } else if (name == "s_curve") {
    ds.Y.resize(n, 3);
    ds.truth.resize(n, 2);
    for (Index i = 0; i < n; ++i) {
      const double t = 3.0 * kPi * (s.uniform() - 0.5);
      const double h = 2.0 * s.uniform();
      ds.Y.row(i) << std::sin(t), h, (t < 0.0 ? -1.0 : 1.0) * (std::cos(t) - 1.0);
      ds.truth.row(i) << t, h;
      ds.labels[static_cast<std::size_t>(i)] = t;
    }
  } else if (name == "ring") {
    ds.Y = DataMatrix::Zero(n, 3);
    ds.truth.resize(n, 2);
    const double phase = 2.0 * kPi * s.uniform();
    for (Index i = 0; i < n; ++i) {
      const double a = phase + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
      ds.Y(i, 0) = std::cos(a);
      ds.Y(i, 1) = std::sin(a);
      ds.truth.row(i) << std::cos(a), std::sin(a);
      ds.labels[static_cast<std::size_t>(i)] = static_cast<double>(i);
    }
  } else if (name == "circle_images_proxy") {
    constexpr double kRadius = 5.0;
    constexpr double kWidth = 1.5;
    const double center = 0.5 * (kImageSide - 1);
    ds.Y.resize(n, kImageSide * kImageSide);
    ds.truth.resize(n, 2);
    const double phase = 2.0 * kPi * s.uniform();
    for (Index i = 0; i < n; ++i) {
      const double a = phase + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
      const double cx = center + kRadius * std::cos(a);
      const double cy = center + kRadius * std::sin(a);
      for (int r = 0; r < kImageSide; ++r) {
        for (int c = 0; c < kImageSide; ++c) {
          const double d2 = (c - cx) * (c - cx) + (r - cy) * (r - cy);
          ds.Y(i, r * kImageSide + c) = std::exp(-d2 / (2.0 * kWidth * kWidth));
        }
      }
      ds.truth.row(i) << std::cos(a), std::sin(a);
      ds.labels[static_cast<std::size_t>(i)] = static_cast<double>(i);
    }
  } else {
    throw InvalidArgument("generate: unknown dataset '" + name + "'");
  }
  add_noise(ds.Y, noise, s);
  return ds;
}

}  // namespace unfold::cli
