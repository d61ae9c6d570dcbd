#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace g2 {

/// Uniform time grid on [0, T] with N_t steps.
struct TimeGrid {
  double T = 1.0;
  int steps = 1;

  TimeGrid() = default;
  TimeGrid(double horizon, int n);
  [[nodiscard]] double dt() const { return T / steps; }
  [[nodiscard]] double time(int n) const { return T * n / steps; }
  [[nodiscard]] int nodes() const { return steps + 1; }

  bool operator==(const TimeGrid&) const = default;
};

/// Table of Brownian increments dW[n][j], j < m, n < N_t.
class NoisePath {
public:
  NoisePath() = default;
  NoisePath(int channels, TimeGrid grid, std::uint64_t seed = 0);

  [[nodiscard]] int channels() const { return m_; }
  [[nodiscard]] const TimeGrid& time() const { return grid_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::span<const double> step(int n) const {
    return {inc_.data() + static_cast<std::size_t>(n) * m_, static_cast<std::size_t>(m_)};
  }
  [[nodiscard]] std::span<double> step(int n) {
    return {inc_.data() + static_cast<std::size_t>(n) * m_, static_cast<std::size_t>(m_)};
  }
  [[nodiscard]] double operator()(int n, int j) const { return inc_[static_cast<std::size_t>(n) * m_ + j]; }

  /// Sum groups of `factor` consecutive increments (same path on a coarser grid).
  [[nodiscard]] NoisePath coarsen(int factor) const;
  [[nodiscard]] NoisePath scaled(double s) const;

  bool operator==(const NoisePath&) const = default;

private:
  int m_ = 0;
  TimeGrid grid_;
  std::uint64_t seed_ = 0;
  std::vector<double> inc_;
};

/// Counter-based Brownian increments: entry (n, j) is sqrt(dt) times a
/// standard normal addressed by hash(seed, channel j, step n). Bit-identical
/// for a fixed seed regardless of evaluation order.
NoisePath brownian_path(std::uint64_t seed, int channels, const TimeGrid& grid);

/// Seed of the sample with index `index` in an ensemble rooted at `root`.
std::uint64_t sample_seed(std::uint64_t root, std::uint64_t index);

/// Piecewise-constant control hdot[n][j] on a time grid.
class Control {
public:
  Control() = default;
  Control(int channels, TimeGrid grid);
  static Control constant(std::span<const double> values, TimeGrid grid);

  [[nodiscard]] int channels() const { return m_; }
  [[nodiscard]] const TimeGrid& time() const { return grid_; }
  [[nodiscard]] std::span<const double> step(int n) const {
    return {hdot_.data() + static_cast<std::size_t>(n) * m_, static_cast<std::size_t>(m_)};
  }
  [[nodiscard]] std::span<double> step(int n) {
    return {hdot_.data() + static_cast<std::size_t>(n) * m_, static_cast<std::size_t>(m_)};
  }
  [[nodiscard]] std::span<const double> values() const { return hdot_; }
  [[nodiscard]] std::span<double> values() { return hdot_; }

  /// E(h) = 1/2 sum_n |hdot_n|^2 dt.
  [[nodiscard]] double energy() const;
  /// Membership in S_N: 2 E(h) <= N.
  [[nodiscard]] bool in_ball(double N) const { return 2.0 * energy() <= N; }
  /// <h1, h2> = sum_n hdot1_n . hdot2_n dt.
  [[nodiscard]] double inner(const Control& other) const;

  Control& axpy(double s, const Control& other);
  Control& operator*=(double s);

  bool operator==(const Control&) const = default;

private:
  int m_ = 0;
  TimeGrid grid_;
  std::vector<double> hdot_;
};

Control operator+(Control a, const Control& b);
Control operator*(double s, Control a);

/// Control CSV: header "step,channel,hdot", one row per (step, channel).
void write_control_csv(const std::filesystem::path& path, const Control& h);
Control read_control_csv(const std::filesystem::path& path, const TimeGrid& grid, int channels);

}  // namespace g2
