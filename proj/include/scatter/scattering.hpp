#pragma once

// Scattering tree: U[p]f = |U[p']f * psi_j| along a path p = (p', j), with
// U[()]f = f, and outputs S_J[p]f = U[p]f * phi_J.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scatter/filterbank.hpp"
#include "scatter/parallel.hpp"
#include "scatter/signal.hpp"

namespace scatter {

struct Path {
  std::vector<int> scales;

  std::size_t length() const noexcept { return scales.size(); }
  Path child(int j) const {
    Path p = *this;
    p.scales.push_back(j);
    return p;
  }
  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < scales.size(); ++i) s += (i ? "," : "") + std::to_string(scales[i]);
    return s + ")";
  }
  auto operator<=>(const Path&) const = default;
};

struct LowPass {
  Spectrum phi;
  int J;

  LowPass(Spectrum phi_hat, int scale) : phi(std::move(phi_hat)), J(scale) {
    if (std::abs(phi.at(0) - cplx(1.0)) > 1e-12) throw InvalidArgument("low-pass must equal 1 at zero frequency");
  }
};

/// gaussian_lowpass with width 2^-J.
inline LowPass default_lowpass(const FilterBank& bank) {
  return LowPass(gaussian_lowpass(std::ldexp(1.0, -bank.J()), bank.size()), bank.J());
}

/// phi_hat = sqrt(max(0, 1 - LP)): completes the bank to a unitary transform
/// wherever its Littlewood-Paley sum does not exceed 1.
inline LowPass tight_lowpass(const FilterBank& bank) {
  const auto lp = bank.lp_grid();
  std::vector<cplx> phi(lp.size());
  for (std::size_t k = 0; k < lp.size(); ++k) phi[k] = std::sqrt(std::max(0.0, 1.0 - lp[k]));
  return LowPass(Spectrum(std::move(phi)), bank.J());
}

/// |phi_hat|^2 + LP == 1 on every grid frequency, to tol.
inline bool is_tight_pair(const FilterBank& bank, const LowPass& low, double tol = 1e-12) {
  if (low.phi.size() != bank.size()) return false;
  const auto lp = bank.lp_grid();
  for (std::size_t k = 0; k < lp.size(); ++k)
    if (std::abs(std::norm(low.phi[k]) + lp[k] - 1.0) > tol) return false;
  return true;
}

struct Budget {
  std::size_t max_depth = 6;
  std::size_t max_breadth = 12;

  static Budget unlimited() {
    return {std::numeric_limits<std::size_t>::max(), std::numeric_limits<std::size_t>::max()};
  }
};

/// Number of paths of length <= depth (saturating).
inline std::uint64_t estimate_paths(std::size_t breadth, std::size_t depth) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1, layer = 1;
  for (std::size_t n = 1; n <= depth; ++n) {
    if (breadth != 0 && layer > kMax / breadth) return kMax;
    layer *= breadth;
    if (total > kMax - layer) return kMax;
    total += layer;
  }
  return total;
}

inline void enforce_budget(std::size_t breadth, std::size_t depth, const Budget& budget) {
  if (depth > budget.max_depth || breadth > budget.max_breadth)
    throw BudgetExceeded("scattering budget exceeded: depth " + std::to_string(depth) + " (max " +
                             std::to_string(budget.max_depth) + "), breadth " + std::to_string(breadth) +
                             " (max " + std::to_string(budget.max_breadth) + ")",
                         estimate_paths(breadth, depth));
}

/// U[path]f.
inline Signal propagate(const Signal& f, const Path& path, const FilterBank& bank) {
  if (f.size() != bank.size()) throw LengthMismatch(bank.size(), f.size());
  Signal u = f;
  for (int j : path.scales) u = modulus(convolve(u, bank.filter(j)));
  return u;
}

struct ScatteringNode {
  Path path;
  double u_energy = 0.0;  // ||U[p]f||^2
  double s_energy = 0.0;  // ||S_J[p]f||^2
  std::optional<Signal> output;
  std::optional<Signal> internal;
};

struct ScatteringResult {
  std::vector<ScatteringNode> nodes;     // retained paths, depth-first, children by increasing scale
  std::vector<double> layer_energies;    // n -> sum_{|p|=n} ||U[p]f||^2
  std::vector<double> output_energies;   // n -> sum_{|p|=n} ||S_J[p]f||^2
  double pruned_mass = 0.0;
  double input_energy = 0.0;
  double prune_eps = 0.0;
  std::size_t max_depth = 0;
  bool tight_pair = false;

  const ScatteringNode* find(const Path& p) const {
    for (const auto& node : nodes)
      if (node.path == p) return &node;
    return nullptr;
  }

  std::map<Path, Signal> outputs() const {
    std::map<Path, Signal> out;
    for (const auto& node : nodes)
      if (node.output) out.emplace(node.path, *node.output);
    return out;
  }
};

struct ScatterOptions {
  Budget budget{};
  bool keep_outputs = true;
  bool keep_internal = false;
};

namespace detail {

struct SubtreeAccumulator {
  std::vector<ScatteringNode> nodes;
  std::vector<double> layer;
  std::vector<double> output;
  double pruned = 0.0;

  explicit SubtreeAccumulator(std::size_t depth) : layer(depth + 1, 0.0), output(depth + 1, 0.0) {}
};

inline Signal wavelet_modulus(const Spectrum& spec, const Spectrum& filter) {
  auto c = spec.coeffs();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= filter[k];
  return modulus(idft(Spectrum(std::move(c))));
}

inline Signal filter_spectrum(const Spectrum& spec, const Spectrum& filter) {
  auto c = spec.coeffs();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= filter[k];
  return idft(Spectrum(std::move(c)));
}

struct ScatterWalk {
  const FilterBank& bank;
  const LowPass& low;
  std::size_t max_depth;
  double threshold;
  const ScatterOptions& opts;

  // Visit a retained node whose U signal is u; its energy is already counted.
  void visit(const Path& path, const Signal& u, double u_energy, SubtreeAccumulator& acc) const {
    const Spectrum spec = dft(u);
    const Signal s = filter_spectrum(spec, low.phi);
    ScatteringNode node{path, u_energy, energy(s), std::nullopt, std::nullopt};
    acc.output[path.length()] += node.s_energy;
    if (opts.keep_outputs) node.output = s;
    if (opts.keep_internal) node.internal = u;
    acc.nodes.push_back(std::move(node));
    if (path.length() >= max_depth) return;
    for (int j = bank.j_min(); j <= bank.J(); ++j) child(path.child(j), spec, j, acc);
  }

  void child(const Path& path, const Spectrum& parent_spec, int j, SubtreeAccumulator& acc) const {
    const Signal u = wavelet_modulus(parent_spec, bank.filter(j));
    const double e = energy(u);
    acc.layer[path.length()] += e;
    if (e < threshold) {
      acc.pruned += e;
      return;
    }
    visit(path, u, e, acc);
  }
};

}  // namespace detail

/// Scattering tree up to depth max_depth. A node with |p| >= 1 and
/// ||U[p]f||^2 < prune_eps ||f||^2 is dropped together with its subtree;
/// its energy still counts in layer_energies and is added to pruned_mass.
/// Sibling subtrees under the root are evaluated concurrently; the result is
/// assembled in path order.
inline ScatteringResult scatter(const Signal& f, const FilterBank& bank, const LowPass& low, std::size_t max_depth,
                                double prune_eps, const ScatterOptions& opts = {}) {
  if (f.size() != bank.size()) throw LengthMismatch(bank.size(), f.size());
  if (low.phi.size() != bank.size()) throw LengthMismatch(bank.size(), low.phi.size());
  if (!(prune_eps >= 0.0)) throw InvalidArgument("prune_eps must be >= 0");
  enforce_budget(bank.breadth(), max_depth, opts.budget);

  ScatteringResult result;
  result.max_depth = max_depth;
  result.prune_eps = prune_eps;
  result.input_energy = energy(f);
  result.tight_pair = is_tight_pair(bank, low);
  result.layer_energies.assign(max_depth + 1, 0.0);
  result.output_energies.assign(max_depth + 1, 0.0);
  result.layer_energies[0] = result.input_energy;

  const detail::ScatterWalk walk{bank, low, max_depth, prune_eps * result.input_energy, opts};
  const Spectrum root_spec = dft(f);
  {
    const Signal s = detail::filter_spectrum(root_spec, low.phi);
    ScatteringNode root{Path{}, result.input_energy, energy(s), std::nullopt, std::nullopt};
    result.output_energies[0] = root.s_energy;
    if (opts.keep_outputs) root.output = s;
    if (opts.keep_internal) root.internal = f;
    result.nodes.push_back(std::move(root));
  }
  if (max_depth == 0) return result;

  const auto scales = bank.scales();
  std::vector<detail::SubtreeAccumulator> parts(scales.size(), detail::SubtreeAccumulator(max_depth));
  parallel_for(scales.size(), [&](std::size_t i) {
    walk.child(Path{{scales[i]}}, root_spec, scales[i], parts[i]);
  });
  for (auto& part : parts) {
    for (std::size_t n = 0; n <= max_depth; ++n) {
      result.layer_energies[n] += part.layer[n];
      result.output_energies[n] += part.output[n];
    }
    result.pruned_mass += part.pruned;
    for (auto& node : part.nodes) result.nodes.push_back(std::move(node));
  }
  return result;
}

/// sum_{|p|<n} ||S_J[p]f||^2 + sum_{|p|=n} ||U[p]f||^2 - ||f||^2.
/// Only meaningful for a tight pair computed without pruning.
inline double energy_balance(const ScatteringResult& result, const Signal& f, std::size_t n) {
  if (!result.tight_pair) throw NonTightPair("energy balance requires a tight wavelet/low-pass pair");
  if (result.prune_eps != 0.0) throw InvalidArgument("energy balance requires prune_eps = 0");
  if (n > result.max_depth) throw InvalidArgument("energy balance depth exceeds the computed depth");
  double total = result.layer_energies[n];
  for (std::size_t m = 0; m < n; ++m) total += result.output_energies[m];
  return total - energy(f);
}

namespace detail {

struct ProfileWalk {
  const FilterBank& bank;
  std::size_t n_max;

  void visit(const Signal& u, std::size_t depth, std::vector<double>& profile) const {
    const Spectrum spec = dft(u);
    if (depth + 1 == n_max) {
      // ||U[p,j]f||^2 = ||U[p]f * psi_j||^2: the leaves need no inverse transform.
      for (int j = bank.j_min(); j <= bank.J(); ++j) {
        const auto& filt = bank.filter(j);
        double e = 0.0;
        for (std::size_t k = 0; k < spec.size(); ++k) e += std::norm(spec[k] * filt[k]);
        profile[depth + 1] += e;
      }
      return;
    }
    for (int j = bank.j_min(); j <= bank.J(); ++j) {
      const Signal child = wavelet_modulus(spec, bank.filter(j));
      profile[depth + 1] += energy(child);
      visit(child, depth + 1, profile);
    }
  }
};

}  // namespace detail

/// profile[n] = sum_{|p|=n} ||U[p]f||^2 for n = 0..n_max, without pruning.
inline std::vector<double> layer_energy_profile(const Signal& f, const FilterBank& bank, std::size_t n_max,
                                                const Budget& budget = {}, std::size_t workers = worker_count()) {
  if (f.size() != bank.size()) throw LengthMismatch(bank.size(), f.size());
  enforce_budget(bank.breadth(), n_max, budget);
  std::vector<double> profile(n_max + 1, 0.0);
  profile[0] = energy(f);
  if (n_max == 0) return profile;
  const detail::ProfileWalk walk{bank, n_max};
  const Spectrum root = dft(f);
  if (n_max == 1) {
    for (int j = bank.j_min(); j <= bank.J(); ++j) {
      double e = 0.0;
      const auto& filt = bank.filter(j);
      for (std::size_t k = 0; k < root.size(); ++k) e += std::norm(root[k] * filt[k]);
      profile[1] += e;
    }
    return profile;
  }
  const auto scales = bank.scales();
  std::vector<std::vector<double>> parts(scales.size(), std::vector<double>(n_max + 1, 0.0));
  parallel_for(scales.size(), [&](std::size_t i) {
    const Signal u = detail::wavelet_modulus(root, bank.filter(scales[i]));
    parts[i][1] += energy(u);
    walk.visit(u, 1, parts[i]);
  }, workers);
  for (const auto& part : parts)
    for (std::size_t n = 1; n <= n_max; ++n) profile[n] += part[n];
  return profile;
}

}  // namespace scatter
