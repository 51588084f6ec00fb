#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "qadc/common/errors.hpp"
#include "qadc/linop/permanent.hpp"
#include "qadc/linop/unitary.hpp"
#include "qadc/photonics/source.hpp"

namespace qadc::photonics {

/// Probability of every threshold-detector click mask over the device modes
/// (index = mask, bit m set when mode m clicked).
using ClickDistribution = std::vector<double>;

namespace detail {

inline ClickDistribution no_clicks(int modes) {
  ClickDistribution d(std::size_t{1} << modes, 0.0);
  d[0] = 1.0;
  return d;
}

/// Adds one independent photon entering `input` (OR of click masks).
inline ClickDistribution add_distinguishable(const ClickDistribution& d,
                                             const linop::UnitaryMatrix& u, int input) {
  ClickDistribution out(d.size(), 0.0);
  const int m = u.dimension();
  for (std::size_t mask = 0; mask < d.size(); ++mask) {
    if (d[mask] == 0.0) continue;
    for (int o = 0; o < m; ++o) out[mask | (std::size_t{1} << o)] += d[mask] * std::norm(u(o, input));
  }
  return out;
}

/// Click masks of mutually indistinguishable photons at distinct inputs:
/// |perm(U[d, s])|^2 / prod(mu!) over every output multiset d.
inline ClickDistribution indistinguishable_clicks(const linop::UnitaryMatrix& u,
                                                  const std::vector<int>& inputs) {
  const int m = u.dimension();
  const int k = static_cast<int>(inputs.size());
  ClickDistribution out(std::size_t{1} << m, 0.0);
  if (k == 0) {
    out[0] = 1.0;
    return out;
  }
  std::vector<int> outputs(static_cast<std::size_t>(k), 0);
  CMatrix sub(k, k);
  while (true) {
    double mult = 1.0;
    std::uint32_t mask = 0;
    for (int i = 0, run = 1; i < k; ++i) {
      run = (i > 0 && outputs[i] == outputs[i - 1]) ? run + 1 : 1;
      mult *= run;
      mask |= std::uint32_t{1} << outputs[i];
      for (int j = 0; j < k; ++j) sub(i, j) = u(outputs[i], inputs[j]);
    }
    out[mask] += std::norm(linop::permanent(sub)) / mult;
    // next non-decreasing sequence
    int pos = k - 1;
    while (pos >= 0 && outputs[pos] == m - 1) --pos;
    if (pos < 0) break;
    ++outputs[pos];
    for (int i = pos + 1; i < k; ++i) outputs[i] = outputs[pos];
  }
  return out;
}

}  // namespace detail

/// Exact click distribution of a fixed ensemble whose main photons share the
/// uniform overlap sqrt(delta) and whose extra photons are orthogonal to all.
///
/// Each main photon's internal state is sqrt(a)|common> + sqrt(1-a)|own_j>
/// with a = sqrt(delta). Expanding the product splits the state into
/// orthogonal branches labelled by the subset T of photons in |common>,
/// weight a^|T| (1-a)^(n-|T|): photons in T interfere perfectly, the rest
/// propagate independently. Extra photons are independent as well.
inline ClickDistribution ensemble_click_distribution(const linop::UnitaryMatrix& u,
                                                     const std::vector<int>& input_modes,
                                                     const std::vector<bool>& main, double delta) {
  if (input_modes.size() != main.size()) throw DomainError("ensemble_click_distribution: size mismatch");
  const int m = u.dimension();
  std::vector<int> mains, extras;
  for (std::size_t i = 0; i < main.size(); ++i) (main[i] ? mains : extras).push_back(input_modes[i]);
  {
    std::vector<int> sorted = mains;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw DomainError("ensemble_click_distribution: main photons must occupy distinct modes");
  }
  const double a = std::sqrt(delta);
  const int n = static_cast<int>(mains.size());
  ClickDistribution total(std::size_t{1} << m, 0.0);
  for (std::uint32_t t = 0; t < (1u << n); ++t) {
    const int in_t = std::popcount(t);
    const double w = std::pow(a, in_t) * std::pow(1.0 - a, n - in_t);
    if (w == 0.0) continue;
    std::vector<int> group;
    for (int j = 0; j < n; ++j)
      if ((t >> j) & 1u) group.push_back(mains[j]);
    ClickDistribution d = detail::indistinguishable_clicks(u, group);
    for (int j = 0; j < n; ++j)
      if (!((t >> j) & 1u)) d = detail::add_distinguishable(d, u, mains[j]);
    for (std::size_t mask = 0; mask < d.size(); ++mask) total[mask] += w * d[mask];
  }
  for (int e : extras) total = detail::add_distinguishable(total, u, e);
  return total;
}

/// Click law of one experiment run, conditioned on at least `min_photons`
/// surviving photons (windows with fewer photons can never produce the
/// required coincidence). `accepted` is the probability of that condition.
struct ExperimentClicks {
  ClickDistribution clicks;
  double accepted = 0.0;
};

inline ExperimentClicks experiment_click_distribution(const linop::UnitaryMatrix& u,
                                                      const std::vector<int>& channel_modes,
                                                      const SourceModel& source, double delta,
                                                      int min_photons) {
  const auto probs = channel_state_probs(source);
  const int c = static_cast<int>(channel_modes.size());
  if (c > 8) throw SizeError("experiment_click_distribution: too many channels");
  const int m = u.dimension();

  // main-photon subsets recur across configurations
  std::map<std::uint32_t, ClickDistribution> by_mains;
  ExperimentClicks out;
  out.clicks.assign(std::size_t{1} << m, 0.0);

  std::uint64_t configs = 1;
  for (int i = 0; i < c; ++i) configs *= 4;
  for (std::uint64_t code = 0; code < configs; ++code) {
    double p = 1.0;
    int count = 0;
    std::uint32_t main_set = 0;
    std::vector<int> extras;
    std::uint64_t rest = code;
    for (int ch = 0; ch < c; ++ch, rest /= 4) {
      const auto s = static_cast<ChannelState>(rest % 4);
      p *= probs[static_cast<int>(s)];
      count += photon_count(s);
      if (s == ChannelState::main || s == ChannelState::both) main_set |= 1u << ch;
      if (s == ChannelState::extra || s == ChannelState::both) extras.push_back(channel_modes[ch]);
    }
    if (p == 0.0 || count < min_photons) continue;
    auto it = by_mains.find(main_set);
    if (it == by_mains.end()) {
      std::vector<int> modes;
      for (int ch = 0; ch < c; ++ch)
        if ((main_set >> ch) & 1u) modes.push_back(channel_modes[ch]);
      it = by_mains
               .emplace(main_set, ensemble_click_distribution(
                                      u, modes, std::vector<bool>(modes.size(), true), delta))
               .first;
    }
    ClickDistribution d = it->second;
    for (int e : extras) d = detail::add_distinguishable(d, u, e);
    for (std::size_t mask = 0; mask < d.size(); ++mask) out.clicks[mask] += p * d[mask];
    out.accepted += p;
  }
  if (!(out.accepted > 0.0))
    throw NumericalError("experiment_click_distribution: source never delivers enough photons");
  for (double& v : out.clicks) v /= out.accepted;
  return out;
}

}  // namespace qadc::photonics
