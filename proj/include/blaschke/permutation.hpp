#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "blaschke/types.hpp"

namespace blaschke {

/// Bijection on {0..n-1}; images[i] is the image of point i.
struct Permutation {
  std::vector<int> images;

  Permutation() = default;
  explicit Permutation(std::vector<int> imgs) : images(std::move(imgs)) { check(); }

  static Permutation identity(int n) {
    Permutation p;
    p.images.resize(static_cast<std::size_t>(n));
    std::iota(p.images.begin(), p.images.end(), 0);
    return p;
  }

  int degree() const { return static_cast<int>(images.size()); }
  int operator()(int i) const { return images[static_cast<std::size_t>(i)]; }

  bool is_identity() const {
    for (int i = 0; i < degree(); ++i)
      if (images[static_cast<std::size_t>(i)] != i) return false;
    return true;
  }

  Permutation inverse() const {
    Permutation p;
    p.images.resize(images.size());
    for (int i = 0; i < degree(); ++i) p.images[static_cast<std::size_t>((*this)(i))] = i;
    return p;
  }

  friend bool operator==(const Permutation& a, const Permutation& b) {
    return a.images == b.images;
  }
  friend bool operator<(const Permutation& a, const Permutation& b) {
    return a.images < b.images;
  }

  void check() const {
    std::vector<bool> seen(images.size(), false);
    for (int v : images) {
      if (v < 0 || v >= degree() || seen[static_cast<std::size_t>(v)])
        throw InvalidInputError("permutation images are not a bijection");
      seen[static_cast<std::size_t>(v)] = true;
    }
  }

  /// Disjoint-cycle string with 1-indexed points, fixed points omitted;
  /// "()" for the identity.
  std::string cycle_string() const {
    std::string out;
    std::vector<bool> seen(images.size(), false);
    for (int i = 0; i < degree(); ++i) {
      if (seen[static_cast<std::size_t>(i)] || (*this)(i) == i) continue;
      out += '(';
      int j = i;
      bool first = true;
      while (!seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        if (!first) out += ' ';
        out += std::to_string(j + 1);
        first = false;
        j = (*this)(j);
      }
      out += ')';
    }
    return out.empty() ? "()" : out;
  }
};

/// Apply `first`, then `then`: result(i) = then(first(i)).
inline Permutation compose_then(const Permutation& first, const Permutation& then) {
  Permutation p;
  p.images.resize(first.images.size());
  for (int i = 0; i < first.degree(); ++i) p.images[static_cast<std::size_t>(i)] = then(first(i));
  return p;
}

inline int cycle_count(const Permutation& p) {
  int count = 0;
  std::vector<bool> seen(p.images.size(), false);
  for (int i = 0; i < p.degree(); ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    ++count;
    for (int j = i; !seen[static_cast<std::size_t>(j)]; j = p(j)) seen[static_cast<std::size_t>(j)] = true;
  }
  return count;
}

inline bool is_n_cycle(const Permutation& p) { return cycle_count(p) == 1 && p.degree() >= 1; }

namespace detail {

/// Hashable element table. Degrees up to 16 pack into a nibble key; larger
/// degrees fall back to an ordered map.
class ElementIndex {
 public:
  explicit ElementIndex(int degree) : degree_(degree), packed_(degree <= 16) {}

  int insert(const Permutation& p) {
    if (packed_) {
      const auto [it, added] = by_key_.try_emplace(pack(p), static_cast<int>(elements_.size()));
      if (added) elements_.push_back(p);
      return it->second;
    }
    const auto [it, added] = by_perm_.try_emplace(p.images, static_cast<int>(elements_.size()));
    if (added) elements_.push_back(p);
    return it->second;
  }

  int find(const Permutation& p) const {
    if (packed_) {
      const auto it = by_key_.find(pack(p));
      return it == by_key_.end() ? -1 : it->second;
    }
    const auto it = by_perm_.find(p.images);
    return it == by_perm_.end() ? -1 : it->second;
  }

  const Permutation& at(int idx) const { return elements_[static_cast<std::size_t>(idx)]; }
  int size() const { return static_cast<int>(elements_.size()); }

 private:
  std::uint64_t pack(const Permutation& p) const {
    std::uint64_t key = 0;
    for (int i = 0; i < degree_; ++i) key |= static_cast<std::uint64_t>(p(i)) << (4 * i);
    return key;
  }

  int degree_;
  bool packed_;
  std::vector<Permutation> elements_;
  std::unordered_map<std::uint64_t, int> by_key_;
  std::map<std::vector<int>, int> by_perm_;
};

/// Stabilizer chain (base and strong generating set), deterministic build.
/// Strong generators are nested: a generator attached at level j fixes the
/// first j base points, so level i acts with every generator attached at
/// levels >= i. The chain is verified by a fixpoint sweep over Schreier
/// generators, restarting whenever a new strong generator appears.
class StabChain {
 public:
  StabChain(const std::vector<Permutation>& gens, int degree) : degree_(degree) {
    for (const Permutation& g : gens) {
      if (g.is_identity()) continue;
      if (levels_.empty()) append_level(min_moved(g));
      levels_[0].added.push_back(g);
    }
    if (!levels_.empty()) verify();
  }

  unsigned long long order() const {
    unsigned long long o = 1;
    for (const Level& level : levels_) o *= static_cast<unsigned long long>(level.orbit.size());
    return o;
  }

 private:
  struct Level {
    int base = 0;
    std::vector<Permutation> added;  // strong generators first fixed at this level
    std::vector<int> orbit;
    std::vector<int> where;  // point -> position in orbit, or -1
    std::vector<Permutation> transversal;
  };

  void append_level(int base) {
    Level level;
    level.base = base;
    level.where.assign(static_cast<std::size_t>(degree_), -1);
    levels_.push_back(std::move(level));
  }

  int min_moved(const Permutation& p) const {
    for (int i = 0; i < degree_; ++i)
      if (p(i) != i) return i;
    throw NumericalError("identity has no moved point");
  }

  std::vector<Permutation> gens_for(int i) const {
    std::vector<Permutation> out;
    for (std::size_t j = static_cast<std::size_t>(i); j < levels_.size(); ++j)
      out.insert(out.end(), levels_[j].added.begin(), levels_[j].added.end());
    return out;
  }

  void rebuild_orbit(int i, const std::vector<Permutation>& gens) {
    Level& level = levels_[static_cast<std::size_t>(i)];
    level.orbit.assign(1, level.base);
    level.where.assign(static_cast<std::size_t>(degree_), -1);
    level.where[static_cast<std::size_t>(level.base)] = 0;
    level.transversal.assign(1, Permutation::identity(degree_));
    for (std::size_t head = 0; head < level.orbit.size(); ++head) {
      const int pt = level.orbit[head];
      for (const Permutation& s : gens) {
        const int np = s(pt);
        if (level.where[static_cast<std::size_t>(np)] < 0) {
          level.where[static_cast<std::size_t>(np)] = static_cast<int>(level.orbit.size());
          level.orbit.push_back(np);
          level.transversal.push_back(compose_then(level.transversal[head], s));
        }
      }
    }
  }

  // Sweep levels deepest-first so strip() below any level sees fresh data;
  // every new strong generator strictly grows some orbit, which bounds the
  // number of restarts.
  void verify() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int i = static_cast<int>(levels_.size()) - 1; i >= 0 && !changed; --i) {
        const std::vector<Permutation> gens = gens_for(i);
        rebuild_orbit(i, gens);
        const Level& level = levels_[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < level.orbit.size() && !changed; ++k) {
          for (const Permutation& s : gens) {
            const int image = s(level.orbit[k]);
            const Permutation schreier = compose_then(
                compose_then(level.transversal[k], s),
                level.transversal[static_cast<std::size_t>(
                                      level.where[static_cast<std::size_t>(image)])]
                    .inverse());
            auto [r, j] = strip(schreier, i + 1);
            if (r.is_identity()) continue;
            if (j == static_cast<int>(levels_.size())) append_level(min_moved(r));
            levels_[static_cast<std::size_t>(j)].added.push_back(std::move(r));
            changed = true;
            break;
          }
        }
      }
    }
  }

  std::pair<Permutation, int> strip(Permutation g, int from) const {
    for (int j = from; j < static_cast<int>(levels_.size()); ++j) {
      const Level& level = levels_[static_cast<std::size_t>(j)];
      const int pt = g(level.base);
      const int k = level.where[static_cast<std::size_t>(pt)];
      if (k < 0) return {std::move(g), j};
      g = compose_then(g, level.transversal[static_cast<std::size_t>(k)].inverse());
    }
    return {std::move(g), static_cast<int>(levels_.size())};
  }

  int degree_;
  std::vector<Level> levels_;
};

}  // namespace detail

inline constexpr unsigned long long kEnumerationCap = 200000;

/// Finitely generated permutation group with its order (stabilizer chain) and,
/// below the enumeration cap, the full element list.
struct PermGroup {
  int degree = 0;
  std::vector<Permutation> generators;
  unsigned long long order = 1;
  bool abelian = true;
  std::optional<std::vector<Permutation>> elements;
};

inline PermGroup generate(std::vector<Permutation> gens, int degree) {
  for (const Permutation& g : gens)
    if (g.degree() != degree) throw InvalidInputError("generator degree mismatch");
  PermGroup g;
  g.degree = degree;
  g.generators = std::move(gens);
  g.order = detail::StabChain(g.generators, degree).order();
  for (std::size_t i = 0; i < g.generators.size() && g.abelian; ++i)
    for (std::size_t j = i + 1; j < g.generators.size() && g.abelian; ++j)
      if (!(compose_then(g.generators[i], g.generators[j]) ==
            compose_then(g.generators[j], g.generators[i])))
        g.abelian = false;
  if (g.order <= kEnumerationCap) {
    detail::ElementIndex index(degree);
    index.insert(Permutation::identity(degree));
    for (int head = 0; head < index.size(); ++head) {
      const Permutation current = index.at(head);
      for (const Permutation& s : g.generators) index.insert(compose_then(current, s));
    }
    std::vector<Permutation> elements;
    elements.reserve(static_cast<std::size_t>(index.size()));
    for (int i = 0; i < index.size(); ++i) elements.push_back(index.at(i));
    if (static_cast<unsigned long long>(elements.size()) != g.order)
      throw NumericalError("element enumeration disagrees with the stabilizer chain order");
    g.elements = std::move(elements);
  }
  return g;
}

inline bool is_transitive(const PermGroup& g) {
  std::vector<bool> seen(static_cast<std::size_t>(g.degree), false);
  std::vector<int> queue{0};
  seen[0] = true;
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (const Permutation& s : g.generators) {
      const int np = s(queue[head]);
      if (!seen[static_cast<std::size_t>(np)]) {
        seen[static_cast<std::size_t>(np)] = true;
        queue.push_back(np);
      }
    }
  return queue.size() == static_cast<std::size_t>(g.degree);
}

/// Partition of {0..n-1} into equal blocks permuted by the group.
struct BlockSystem {
  std::vector<int> block_of;            ///< point -> block id
  std::vector<std::vector<int>> blocks; ///< sorted blocks, ordered by least element
  int block_size = 0;
  int block_count = 0;

  friend bool operator==(const BlockSystem& a, const BlockSystem& b) {
    return a.block_of == b.block_of;
  }
  friend bool operator<(const BlockSystem& a, const BlockSystem& b) {
    if (a.block_size != b.block_size) return a.block_size < b.block_size;
    return a.block_of < b.block_of;
  }
};

namespace detail {

inline BlockSystem system_from_classes(const std::vector<int>& rep_of, int n) {
  // rep_of maps each point to a class representative; renumber by least member.
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[rep_of[static_cast<std::size_t>(i)]].push_back(i);
  std::vector<std::vector<int>> blocks;
  for (auto& [rep, members] : groups) blocks.push_back(std::move(members));
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  BlockSystem bs;
  bs.blocks = std::move(blocks);
  bs.block_count = static_cast<int>(bs.blocks.size());
  bs.block_size = static_cast<int>(bs.blocks.front().size());
  bs.block_of.assign(static_cast<std::size_t>(n), -1);
  for (int id = 0; id < bs.block_count; ++id)
    for (int pt : bs.blocks[static_cast<std::size_t>(id)]) bs.block_of[static_cast<std::size_t>(pt)] = id;
  return bs;
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x)
      x = parent_[static_cast<std::size_t>(x)] =
          parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;  // keep least representative
    return true;
  }

 private:
  std::vector<int> parent_;
};

/// Finest G-congruence identifying the two seed points (Atkinson refinement).
inline BlockSystem minimal_congruence(const std::vector<Permutation>& gens, int n, int seed_a,
                                      int seed_b) {
  UnionFind uf(n);
  std::vector<std::pair<int, int>> queue{{seed_a, seed_b}};
  uf.unite(seed_a, seed_b);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [a, b] = queue[head];
    for (const Permutation& g : gens) {
      const int ga = g(a), gb = g(b);
      if (uf.unite(ga, gb)) queue.emplace_back(ga, gb);
    }
  }
  std::vector<int> rep(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rep[static_cast<std::size_t>(i)] = uf.find(i);
  return system_from_classes(rep, n);
}

inline BlockSystem join(const BlockSystem& p, const BlockSystem& q, int n) {
  UnionFind uf(n);
  for (const auto& block : p.blocks)
    for (std::size_t i = 1; i < block.size(); ++i) uf.unite(block[0], block[i]);
  for (const auto& block : q.blocks)
    for (std::size_t i = 1; i < block.size(); ++i) uf.unite(block[0], block[i]);
  std::vector<int> rep(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rep[static_cast<std::size_t>(i)] = uf.find(i);
  return system_from_classes(rep, n);
}

}  // namespace detail

/// Does every generator map blocks onto blocks?
inline bool respects(const PermGroup& g, const BlockSystem& bs) {
  for (const Permutation& s : g.generators)
    for (const auto& block : bs.blocks) {
      const int target = bs.block_of[static_cast<std::size_t>(s(block.front()))];
      for (int pt : block)
        if (bs.block_of[static_cast<std::size_t>(s(pt))] != target) return false;
    }
  return true;
}

/// All nontrivial block systems of a transitive group: minimal congruences for
/// every seed pair {0, j}, closed under join. Blocks of equal size partition
/// the points; systems are sorted by block size, then lexicographically.
inline std::vector<BlockSystem> all_block_systems(const PermGroup& g) {
  if (!is_transitive(g)) throw InvalidInputError("block systems require a transitive group");
  const int n = g.degree;
  std::set<BlockSystem> found;
  for (int j = 1; j < n; ++j) {
    BlockSystem bs = detail::minimal_congruence(g.generators, n, 0, j);
    if (bs.block_size > 1 && bs.block_size < n) found.insert(std::move(bs));
  }
  // Join closure: congruences form a lattice, and every invariant partition is
  // a join of minimal ones.
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<BlockSystem> snapshot(found.begin(), found.end());
    for (std::size_t i = 0; i < snapshot.size(); ++i)
      for (std::size_t j = i + 1; j < snapshot.size(); ++j) {
        BlockSystem joined = detail::join(snapshot[i], snapshot[j], n);
        if (joined.block_size > 1 && joined.block_size < n && found.insert(joined).second)
          grew = true;
      }
  }
  std::vector<BlockSystem> out(found.begin(), found.end());
  for (const BlockSystem& bs : out) {
    if (n % bs.block_size != 0 || !respects(g, bs))
      throw NumericalError("block-system construction produced an invalid system");
  }
  return out;
}

struct SubgroupDescriptor {
  unsigned long long order = 1;
  std::vector<Permutation> generators;  ///< class representatives generating the subgroup
};

struct NormalSubgroupReport {
  bool declined = false;  ///< group order above the enumeration cap
  std::vector<SubgroupDescriptor> subgroups;
};

/// Normal subgroups as closures of unions of conjugacy classes, found by
/// breadth-first combination starting from the trivial subgroup. Declines
/// gracefully when the group is not fully enumerated.
inline NormalSubgroupReport normal_subgroups(const PermGroup& g) {
  NormalSubgroupReport report;
  if (!g.elements) {
    report.declined = true;
    return report;
  }
  const int n = g.degree;
  const auto& elems = *g.elements;
  detail::ElementIndex index(n);
  for (const Permutation& e : elems) index.insert(e);
  const int order = index.size();
  const int id_idx = index.find(Permutation::identity(n));

  std::vector<Permutation> gen_invs;
  gen_invs.reserve(g.generators.size());
  for (const Permutation& s : g.generators) gen_invs.push_back(s.inverse());

  // Conjugacy classes via conjugation orbits under the generators.
  std::vector<int> class_of(static_cast<std::size_t>(order), -1);
  std::vector<std::vector<int>> classes;
  for (int e = 0; e < order; ++e) {
    if (class_of[static_cast<std::size_t>(e)] >= 0) continue;
    const int cid = static_cast<int>(classes.size());
    classes.emplace_back();
    std::vector<int> queue{e};
    class_of[static_cast<std::size_t>(e)] = cid;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int x = queue[head];
      classes[static_cast<std::size_t>(cid)].push_back(x);
      for (std::size_t s = 0; s < g.generators.size(); ++s) {
        const Permutation conj =
            compose_then(compose_then(gen_invs[s], index.at(x)), g.generators[s]);
        const int y = index.find(conj);
        if (class_of[static_cast<std::size_t>(y)] < 0) {
          class_of[static_cast<std::size_t>(y)] = cid;
          queue.push_back(y);
        }
      }
    }
  }

  // Class products: the set of classes met by rep(Ci) * Cj. The set does not
  // depend on the representative (conjugating the rep conjugates the product
  // set classwise), so a union of classes is product-closed exactly when these
  // tables stay inside it.
  const int class_count = static_cast<int>(classes.size());
  std::vector<std::vector<std::vector<int>>> prod(
      static_cast<std::size_t>(class_count),
      std::vector<std::vector<int>>(static_cast<std::size_t>(class_count)));
  for (int ci = 0; ci < class_count; ++ci) {
    const Permutation& rep = index.at(classes[static_cast<std::size_t>(ci)].front());
    for (int cj = 0; cj < class_count; ++cj) {
      std::set<int> hit;
      for (int y : classes[static_cast<std::size_t>(cj)])
        hit.insert(class_of[static_cast<std::size_t>(index.find(compose_then(rep, index.at(y))))]);
      prod[static_cast<std::size_t>(ci)][static_cast<std::size_t>(cj)].assign(hit.begin(),
                                                                              hit.end());
    }
  }

  // Close a set of class ids under multiplication; the resulting union of
  // classes is a (normal) subgroup.
  auto close_classes = [&](std::set<int> sig) {
    bool grew = true;
    while (grew) {
      grew = false;
      const std::vector<int> snapshot(sig.begin(), sig.end());
      for (int ci : snapshot)
        for (int cj : snapshot)
          for (int ck : prod[static_cast<std::size_t>(ci)][static_cast<std::size_t>(cj)])
            if (sig.insert(ck).second) grew = true;
    }
    return std::vector<int>(sig.begin(), sig.end());
  };

  auto order_of_sig = [&](const std::vector<int>& sig) {
    unsigned long long o = 0;
    for (int cid : sig) o += static_cast<unsigned long long>(classes[static_cast<std::size_t>(cid)].size());
    return o;
  };

  const int id_class = class_of[static_cast<std::size_t>(id_idx)];

  // Breadth-first combination: grow known normal subgroups one class at a time.
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> found;
  const std::vector<int> trivial_sig{id_class};
  seen.insert(trivial_sig);
  found.push_back(trivial_sig);
  for (std::size_t head = 0; head < found.size(); ++head) {
    const std::vector<int> sig = found[head];
    for (int cid = 0; cid < class_count; ++cid) {
      if (std::binary_search(sig.begin(), sig.end(), cid)) continue;
      std::set<int> seed(sig.begin(), sig.end());
      seed.insert(cid);
      std::vector<int> closed = close_classes(std::move(seed));
      if (seen.insert(closed).second) found.push_back(std::move(closed));
    }
  }

  std::sort(found.begin(), found.end(), [&](const auto& a, const auto& b) {
    const auto oa = order_of_sig(a), ob = order_of_sig(b);
    if (oa != ob) return oa < ob;
    return a < b;
  });
  for (const std::vector<int>& sig : found) {
    SubgroupDescriptor desc;
    desc.order = order_of_sig(sig);
    for (int cid : sig)
      if (cid != id_class)
        desc.generators.push_back(index.at(classes[static_cast<std::size_t>(cid)].front()));
    report.subgroups.push_back(std::move(desc));
  }
  return report;
}

}  // namespace blaschke
