#include "g2/noise.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "g2/rng.hpp"

namespace g2 {

TimeGrid::TimeGrid(double horizon, int n) : T(horizon), steps(n) {
  if (n < 1) throw std::invalid_argument("TimeGrid: need at least one step");
  if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
}

NoisePath::NoisePath(int channels, TimeGrid grid, std::uint64_t seed)
    : m_(channels), grid_(grid), seed_(seed), inc_(static_cast<std::size_t>(channels) * grid.steps, 0.0) {
  if (channels < 1) throw std::invalid_argument("NoisePath: need at least one channel");
}

NoisePath NoisePath::coarsen(int factor) const {
  if (factor < 1 || grid_.steps % factor != 0) {
    throw std::invalid_argument("NoisePath::coarsen: factor must divide the step count");
  }
  NoisePath out(m_, TimeGrid(grid_.T, grid_.steps / factor), seed_);
  for (int n = 0; n < out.grid_.steps; ++n) {
    auto dst = out.step(n);
    for (int r = 0; r < factor; ++r) {
      const auto src = step(n * factor + r);
      for (int j = 0; j < m_; ++j) dst[j] += src[j];
    }
  }
  return out;
}

NoisePath NoisePath::scaled(double s) const {
  NoisePath out(*this);
  for (double& x : out.inc_) x *= s;
  return out;
}

NoisePath brownian_path(std::uint64_t seed, int channels, const TimeGrid& grid) {
  NoisePath path(channels, grid, seed);
  const double sdt = std::sqrt(grid.dt());
  for (int j = 0; j < channels; ++j) {
    const std::uint64_t ck = rng::derive(seed, static_cast<std::uint64_t>(j));
    for (int n = 0; n < grid.steps; ++n) {
      path.step(n)[j] = sdt * rng::normal(rng::derive(ck, static_cast<std::uint64_t>(n)));
    }
  }
  return path;
}

std::uint64_t sample_seed(std::uint64_t root, std::uint64_t index) { return rng::derive(root, index); }

Control::Control(int channels, TimeGrid grid)
    : m_(channels), grid_(grid), hdot_(static_cast<std::size_t>(channels) * grid.steps, 0.0) {
  if (channels < 1) throw std::invalid_argument("Control: need at least one channel");
}

Control Control::constant(std::span<const double> values, TimeGrid grid) {
  Control h(static_cast<int>(values.size()), grid);
  for (int n = 0; n < grid.steps; ++n) {
    auto row = h.step(n);
    std::copy(values.begin(), values.end(), row.begin());
  }
  return h;
}

double Control::energy() const { return 0.5 * inner(*this); }

double Control::inner(const Control& other) const {
  if (other.hdot_.size() != hdot_.size()) throw std::invalid_argument("Control::inner: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < hdot_.size(); ++i) s += hdot_[i] * other.hdot_[i];
  return s * grid_.dt();
}

Control& Control::axpy(double s, const Control& other) {
  if (other.hdot_.size() != hdot_.size()) throw std::invalid_argument("Control::axpy: shape mismatch");
  for (std::size_t i = 0; i < hdot_.size(); ++i) hdot_[i] += s * other.hdot_[i];
  return *this;
}

Control& Control::operator*=(double s) {
  for (double& x : hdot_) x *= s;
  return *this;
}

Control operator+(Control a, const Control& b) { return a.axpy(1.0, b); }
Control operator*(double s, Control a) { return a *= s; }

void write_control_csv(const std::filesystem::path& path, const Control& h) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "step,channel,hdot\n";
  for (int n = 0; n < h.time().steps; ++n) {
    const auto row = h.step(n);
    for (int j = 0; j < h.channels(); ++j) os << fmt::format("{},{},{:.17g}\n", n, j, row[j]);
  }
}

Control read_control_csv(const std::filesystem::path& path, const TimeGrid& grid, int channels) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open control file " + path.string());
  Control h(channels, grid);
  std::vector<unsigned char> seen(h.values().size(), 0);
  std::string line;
  std::getline(is, line);
  if (line != "step,channel,hdot") throw std::runtime_error(path.string() + ": bad control CSV header");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    int n = -1, j = -1;
    double v = 0.0;
    char c1 = 0, c2 = 0;
    if (!(ls >> n >> c1 >> j >> c2 >> v) || c1 != ',' || c2 != ',') {
      throw std::runtime_error(fmt::format("{}:{}: malformed control row", path.string(), lineno));
    }
    if (n < 0 || n >= grid.steps || j < 0 || j >= channels) {
      throw std::runtime_error(fmt::format("{}:{}: step or channel out of range", path.string(), lineno));
    }
    const std::size_t slot = static_cast<std::size_t>(n) * channels + j;
    if (seen[slot]++) throw std::runtime_error(fmt::format("{}:{}: duplicate row", path.string(), lineno));
    h.step(n)[j] = v;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw std::runtime_error(fmt::format("{}: missing row for step {} channel {}", path.string(),
                                           i / channels, i % channels));
    }
  }
  return h;
}

}  // namespace g2
