#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace omsim {

template <std::size_t N>
using StateVec = std::array<double, N>;

/// One classical fourth-order Runge-Kutta step of an autonomous system
/// y' = f(y). `f` is any callable StateVec<N>(const StateVec<N>&).
template <std::size_t N, class F>
StateVec<N> rk4_advance(const StateVec<N>& y, double h, F&& f) {
  StateVec<N> stage;
  const StateVec<N> k1 = f(y);
  for (std::size_t i = 0; i < N; ++i) stage[i] = y[i] + 0.5 * h * k1[i];
  const StateVec<N> k2 = f(stage);
  for (std::size_t i = 0; i < N; ++i) stage[i] = y[i] + 0.5 * h * k2[i];
  const StateVec<N> k3 = f(stage);
  for (std::size_t i = 0; i < N; ++i) stage[i] = y[i] + h * k3[i];
  const StateVec<N> k4 = f(stage);

  StateVec<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

template <std::size_t N>
bool all_finite(const StateVec<N>& y) {
  for (double v : y) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace omsim
