// Copyright 2026 The srake Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SRAKE_GA_HPP
#define SRAKE_GA_HPP

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "srake/rng.hpp"
#include "srake/selectors.hpp"
#include "srake/sinr.hpp"

// Genetic search over finger assignments, with the exact SINR as fitness.
// Chromosomes are binary selection vectors with exactly M ones; crossover
// draws child indices from the concatenated parent supports, so paths present
// in both parents are twice as likely to be inherited; mutation swaps one
// selected path for an unselected one and never touches the current best.

namespace srake {

struct GaConfig {
  int initial_population = 32;  // assignments drawn at startup
  int population = 16;          // survivors per generation
  int parents = 8;              // chromosomes paired each generation (even)
  int mutations = 8;            // swap mutations per generation
  int iterations = 10;

  void validate() const {
    auto fail = [](const char* what) { throw std::invalid_argument(std::string("GaConfig: ") + what); };
    if (initial_population < 1 || population < 1 || parents < 1 || mutations < 0 || iterations < 0)
      fail("population counts must be positive");
    if (parents % 2 != 0) fail("parents must be even");
    if (parents > population) fail("parents must not exceed population");
    if (population > initial_population) fail("population must not exceed initial_population");
  }
};

struct GaMember {
  SelectionVector x;
  double fitness = 0.0;
};

struct Population {
  std::vector<GaMember> members;

  int size() const { return static_cast<int>(members.size()); }

  int best_index() const {
    int b = 0;
    for (int i = 1; i < size(); ++i)
      if (members[i].fitness > members[b].fitness) b = i;
    return b;
  }
};

namespace ga_detail {

/// Uniform M-subset of {0..L-1} via partial Fisher-Yates.
inline SelectionVector random_assignment(int paths, int fingers, Rng& rng) {
  std::vector<int> perm(paths);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = 0; i < fingers; ++i) {
    const int j = i + rng.next_below(paths - i);
    std::swap(perm[i], perm[j]);
  }
  std::vector<int> idx(perm.begin(), perm.begin() + fingers);
  return SelectionVector::from_support(idx, paths);
}

}  // namespace ga_detail

/// Draw `initial_population` distinct assignments uniformly at random, then
/// keep the `population` fittest (sorted by descending fitness).
inline Population ga_init(const MaiSignature& sig, const SystemConfig& cfg, const GaConfig& ga,
                          Rng& rng) {
  ga.validate();
  if (combination_count(cfg.paths, cfg.fingers) <
      static_cast<std::uint64_t>(ga.initial_population)) {
    throw std::invalid_argument(
        "ga_init: fewer distinct assignments than initial_population; "
        "use exhaustive search instead");
  }
  std::vector<GaMember> pool;
  std::vector<std::vector<std::uint8_t>> seen;
  pool.reserve(ga.initial_population);
  while (static_cast<int>(pool.size()) < ga.initial_population) {
    SelectionVector x = ga_detail::random_assignment(cfg.paths, cfg.fingers, rng);
    if (std::find(seen.begin(), seen.end(), x.bits) != seen.end()) continue;
    seen.push_back(x.bits);
    GaMember m;
    m.fitness = exact_sinr(x, sig, cfg.desired_energy(), cfg.noise_var);
    m.x = std::move(x);
    pool.push_back(std::move(m));
  }
  std::stable_sort(pool.begin(), pool.end(),
                   [](const GaMember& a, const GaMember& b) { return a.fitness > b.fitness; });
  pool.resize(ga.population);
  return Population{std::move(pool)};
}

/// Fitness-proportional sampling of `parents` distinct members (without
/// replacement), paired in sampling order.
inline std::vector<std::pair<int, int>> pair_parents(const Population& pop, int parents, Rng& rng) {
  if (parents > pop.size() || parents % 2 != 0)
    throw std::invalid_argument("pair_parents: invalid parent count");
  std::vector<int> remaining(pop.size());
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<int> chosen;
  chosen.reserve(parents);
  for (int draw = 0; draw < parents; ++draw) {
    double total = 0.0;
    for (int i : remaining) total += std::max(pop.members[i].fitness, 1e-300);
    double r = rng.next_double() * total;
    int pick = static_cast<int>(remaining.size()) - 1;
    for (int j = 0; j < static_cast<int>(remaining.size()); ++j) {
      r -= std::max(pop.members[remaining[j]].fitness, 1e-300);
      if (r <= 0.0) {
        pick = j;
        break;
      }
    }
    chosen.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + pick);
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i + 1 < parents; i += 2) pairs.emplace_back(chosen[i], chosen[i + 1]);
  return pairs;
}

struct MateResult {
  SelectionVector child;
  bool degenerate = false;  // parents identical; child forced equal
};

/// Build a child by drawing indices uniformly from the concatenation of the
/// two parent supports until M distinct ones are collected (already-chosen
/// draws are skipped). A child equal to either parent is redrawn a bounded
/// number of times and then accepted.
inline MateResult mate(const SelectionVector& x1, const SelectionVector& x2, Rng& rng) {
  const int paths = static_cast<int>(x1.bits.size());
  const auto s1 = x1.support();
  const auto s2 = x2.support();
  const int m = static_cast<int>(s1.size());
  if (static_cast<int>(s2.size()) != m || static_cast<int>(x2.bits.size()) != paths)
    throw std::invalid_argument("mate: parents disagree on dimensions");

  if (x1.bits == x2.bits) return MateResult{x1, true};

  std::vector<int> pool(s1);
  pool.insert(pool.end(), s2.begin(), s2.end());

  MateResult res;
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::vector<std::uint8_t> bits(paths, 0);
    int picked = 0;
    int guard = 0;
    while (picked < m && guard < 1000 * m) {
      ++guard;
      const int idx = pool[rng.next_below(static_cast<int>(pool.size()))];
      if (!bits[idx]) {
        bits[idx] = 1;
        ++picked;
      }
    }
    if (picked < m) {  // exhausted draws; fill from the remaining union
      for (int idx : pool) {
        if (picked == m) break;
        if (!bits[idx]) {
          bits[idx] = 1;
          ++picked;
        }
      }
    }
    res.child.bits = std::move(bits);
    if (res.child.bits != x1.bits && res.child.bits != x2.bits) return res;
  }
  return res;  // persistent duplicate accepted after bounded retries
}

/// Apply `count` swap mutations to uniformly chosen members, never the
/// current best. Each mutation flips one selected and one unselected path,
/// preserving cardinality; the member's fitness is recomputed. Returns the
/// number of mutations actually applied (0 when every path is selected or
/// the population has a single member).
inline int mutate(Population& pop, int count, const MaiSignature& sig, double e1, double noise_var,
                  Rng& rng) {
  if (pop.size() < 2) return 0;
  const int paths = static_cast<int>(pop.members[0].x.bits.size());
  const int m = pop.members[0].x.ones();
  if (m >= paths) return 0;  // no unselected path to flip
  int applied = 0;
  for (int c = 0; c < count; ++c) {
    const int best = pop.best_index();
    int victim = rng.next_below(pop.size() - 1);
    if (victim >= best) ++victim;
    auto& member = pop.members[victim];
    const auto sel = member.x.support();
    std::vector<int> unsel;
    unsel.reserve(paths - m);
    for (int i = 0; i < paths; ++i)
      if (!member.x.bits[i]) unsel.push_back(i);
    const int off = sel[rng.next_below(static_cast<int>(sel.size()))];
    const int on = unsel[rng.next_below(static_cast<int>(unsel.size()))];
    member.x.bits[off] = 0;
    member.x.bits[on] = 1;
    member.fitness = exact_sinr(member.x, sig, e1, noise_var);
    ++applied;
  }
  return applied;
}

/// Full GA run: init, then `iterations` rounds of pairing, mating,
/// replacement and mutation; returns the best assignment ever seen.
///
/// Replacement: with population == 2*parents the next generation is exactly
/// the parents plus their children; otherwise children are appended and the
/// pool is truncated to the fittest. Either way the best member of the
/// previous generation is retained, so the population maximum never
/// decreases.
inline SelectionOutcome ga_select(const MaiSignature& sig, const SystemConfig& cfg,
                                  const GaConfig& ga, Rng& rng) {
  Population pop = ga_init(sig, cfg, ga, rng);
  GaMember best_ever = pop.members[pop.best_index()];

  for (int iter = 0; iter < ga.iterations; ++iter) {
    const auto pairs = pair_parents(pop, ga.parents, rng);

    std::vector<GaMember> children;
    children.reserve(ga.parents);
    for (const auto& [a, b] : pairs) {
      for (int twin = 0; twin < 2; ++twin) {
        MateResult r = mate(pop.members[a].x, pop.members[b].x, rng);
        GaMember child;
        child.fitness = exact_sinr(r.child, sig, cfg.desired_energy(), cfg.noise_var);
        child.x = std::move(r.child);
        if (child.fitness > best_ever.fitness) best_ever = child;
        children.push_back(std::move(child));
      }
    }

    if (pop.size() == 2 * ga.parents) {
      const int old_best = pop.best_index();
      bool best_is_parent = false;
      std::vector<GaMember> next;
      next.reserve(pop.size());
      for (const auto& [a, b] : pairs) {
        next.push_back(pop.members[a]);
        next.push_back(pop.members[b]);
        best_is_parent = best_is_parent || a == old_best || b == old_best;
      }
      if (!best_is_parent) {
        int worst = 0;
        for (int i = 1; i < static_cast<int>(children.size()); ++i)
          if (children[i].fitness < children[worst].fitness) worst = i;
        children[worst] = pop.members[old_best];
      }
      for (auto& c : children) next.push_back(std::move(c));
      pop.members = std::move(next);
    } else {
      for (auto& c : children) pop.members.push_back(std::move(c));
      std::stable_sort(pop.members.begin(), pop.members.end(),
                       [](const GaMember& a, const GaMember& b) { return a.fitness > b.fitness; });
      pop.members.resize(ga.population);
    }

    mutate(pop, ga.mutations, sig, cfg.desired_energy(), cfg.noise_var, rng);
    const auto& iter_best = pop.members[pop.best_index()];
    if (iter_best.fitness > best_ever.fitness) best_ever = iter_best;
  }

  SelectionOutcome out;
  out.method = Method::Ga;
  out.fingers.indices = best_ever.x.support();
  out.exact_sinr = best_ever.fitness;
  return out;
}

}  // namespace srake

#endif  // SRAKE_GA_HPP
