#include "mcnet/duplication_tree.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "mcnet/rng.h"

namespace mcnet {

ClusterMetric ParseClusterMetric(const std::string& name) {
  if (name == "geographic") return ClusterMetric::kGeographic;
  if (name == "hop") return ClusterMetric::kHopDistance;
  if (name == "capacity") return ClusterMetric::kReciprocalCapacity;
  if (name == "cost") return ClusterMetric::kUnitCost;
  throw InvalidInput("unknown cluster metric '" + name +
                     "' (expected geographic, hop, capacity or cost)");
}

std::string ClusterMetricName(ClusterMetric metric) {
  switch (metric) {
    case ClusterMetric::kGeographic:
      return "geographic";
    case ClusterMetric::kHopDistance:
      return "hop";
    case ClusterMetric::kReciprocalCapacity:
      return "capacity";
    case ClusterMetric::kUnitCost:
      return "cost";
  }
  return "?";
}

int DupTree::AddNode(DupStatus status) {
  nodes_.push_back({status, -1, -1});
  return size() - 1;
}

void DupTree::SetChildren(int parent, int first, int second) {
  nodes_[parent].first_child = first;
  nodes_[parent].second_child = second;
}

int DupTree::num_internal() const {
  return static_cast<int>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

bool DupTree::IsValid(std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const int d = num_destinations_;
  if (nodes_.empty()) return fail("empty tree");
  if (root().status != DupStatus::AllOnes(d)) return fail("root is not the full set");
  if (size() != 2 * d - 1) return fail("node count is not 2D - 1");
  uint32_t leaves = 0;
  std::vector<int> parents(size(), 0);
  for (int i = 0; i < size(); ++i) {
    const TreeNode& n = nodes_[i];
    if (n.is_leaf() != (n.second_child < 0)) return fail("node with a single child");
    if (n.is_leaf()) {
      if (n.status.count() != 1) return fail("leaf is not a single destination");
      if (leaves & n.status.bits()) return fail("repeated leaf");
      leaves |= n.status.bits();
      continue;
    }
    if (n.first_child >= size() || n.second_child >= size()) return fail("bad child index");
    const DupStatus s = nodes_[n.first_child].status;
    const DupStatus r = nodes_[n.second_child].status;
    if (s.empty() || r.empty() || (s & r) != DupStatus() || (s | r) != n.status) {
      return fail("children do not partition " + n.status.ToString(d));
    }
    ++parents[n.first_child];
    ++parents[n.second_child];
  }
  if (leaves != DupStatus::AllOnes(d).bits()) return fail("leaves do not cover all destinations");
  if (parents[0] != 0) return fail("root has a parent");
  for (int i = 1; i < size(); ++i) {
    if (parents[i] != 1) return fail("node reachable more than once");
  }
  return true;
}

std::string DupTree::ToString() const {
  std::string out;
  auto rec = [&](auto&& self, int i) -> void {
    const TreeNode& n = nodes_[i];
    out += n.status.ToString(num_destinations_);
    if (n.is_leaf()) return;
    out += '(';
    self(self, n.first_child);
    out += ',';
    self(self, n.second_child);
    out += ')';
  };
  if (!nodes_.empty()) rec(rec, 0);
  return out;
}

std::vector<std::vector<double>> DestinationDistances(const Network& network,
                                                      ClusterMetric metric) {
  const auto& dests = network.destinations();
  const int d = static_cast<int>(dests.size());
  std::vector<std::vector<double>> dist(d, std::vector<double>(d, 0.0));
  const double unreachable = static_cast<double>(kUnreachableHops);
  switch (metric) {
    case ClusterMetric::kGeographic: {
      for (int a = 0; a < d; ++a) {
        const auto& pa = network.node(dests[a]).position;
        if (!pa) {
          throw InvalidInput("geographic clustering needs a position for node '" +
                             network.node(dests[a]).name + "'");
        }
        for (int b = 0; b < d; ++b) {
          const auto& pb = network.node(dests[b]).position;
          if (!pb) continue;
          dist[a][b] = std::hypot(pa->x - pb->x, pa->y - pb->y);
        }
      }
      return dist;
    }
    case ClusterMetric::kHopDistance: {
      HopTable hops = HopDistances(network, dests);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          const double ab = static_cast<double>(hops[dests[a]][b]);
          const double ba = static_cast<double>(hops[dests[b]][a]);
          dist[a][b] = std::min(unreachable, 0.5 * (ab + ba));
        }
      }
      return dist;
    }
    case ClusterMetric::kReciprocalCapacity:
    case ClusterMetric::kUnitCost: {
      std::vector<double> weight(network.num_edges());
      for (int e = 0; e < network.num_edges(); ++e) {
        const Edge& edge = network.edge(e);
        if (metric == ClusterMetric::kUnitCost) {
          weight[e] = edge.cost;
        } else {
          weight[e] = edge.capacity > 0 ? 1.0 / static_cast<double>(edge.capacity)
                                        : std::numeric_limits<double>::infinity();
        }
      }
      std::vector<std::vector<double>> one_way(d);
      for (int a = 0; a < d; ++a) {
        auto lengths = ShortestPathLengths(network, dests[a], weight);
        one_way[a].resize(d);
        for (int b = 0; b < d; ++b) one_way[a][b] = lengths[dests[b]];
      }
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          const double v = 0.5 * (one_way[a][b] + one_way[b][a]);
          dist[a][b] = std::isfinite(v) ? std::min(v, unreachable) : unreachable;
        }
      }
      return dist;
    }
  }
  return dist;
}

namespace {

double MedoidCost(const std::vector<std::vector<double>>& dist, const std::vector<int>& cluster) {
  double best = std::numeric_limits<double>::infinity();
  for (int m : cluster) {
    double sum = 0.0;
    for (int x : cluster) sum += dist[x][m];
    best = std::min(best, sum);
  }
  return best;
}

double SumSquaredError(const std::vector<Point>& pos, const std::vector<int>& cluster) {
  double cx = 0.0, cy = 0.0;
  for (int x : cluster) {
    cx += pos[x].x;
    cy += pos[x].y;
  }
  cx /= static_cast<double>(cluster.size());
  cy /= static_cast<double>(cluster.size());
  double sse = 0.0;
  for (int x : cluster) sse += (pos[x].x - cx) * (pos[x].x - cx) + (pos[x].y - cy) * (pos[x].y - cy);
  return sse;
}

// Members whose bit is set in `mask` go first; bit 0 (smallest member) is
// always set by the callers.
Bipartition FromMask(const std::vector<int>& members, uint32_t mask) {
  Bipartition p;
  for (size_t i = 0; i < members.size(); ++i) {
    ((mask >> i) & 1u ? p.first : p.second).push_back(members[i]);
  }
  return p;
}

void Canonicalize(Bipartition& p) {
  std::sort(p.first.begin(), p.first.end());
  std::sort(p.second.begin(), p.second.end());
  if (!p.second.empty() && (p.first.empty() || p.second.front() < p.first.front())) {
    std::swap(p.first, p.second);
  }
}

DupStatus MaskOf(const std::vector<int>& members) {
  uint32_t bits = 0;
  for (int k : members) bits |= uint32_t{1} << k;
  return DupStatus(bits);
}

}  // namespace

Bipartition MedoidBisection(const std::vector<std::vector<double>>& dist,
                            const std::vector<int>& members) {
  const size_t n = members.size();
  if (n < 2) throw InvalidInput("bisection needs at least two members");
  if (n <= 8) {
    Bipartition best;
    best.cost = std::numeric_limits<double>::infinity();
    const uint32_t full = (uint32_t{1} << n) - 1;
    for (uint32_t mask = 1; mask < full; mask += 2) {
      Bipartition p = FromMask(members, mask);
      p.cost = MedoidCost(dist, p.first) + MedoidCost(dist, p.second);
      if (p.cost < best.cost) best = std::move(p);
    }
    return best;
  }
  // Farthest pair seeds, then nearest-seed assignment.
  int sa = members[0], sb = members[1];
  double far = -1.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (dist[members[i]][members[j]] > far) {
        far = dist[members[i]][members[j]];
        sa = members[i];
        sb = members[j];
      }
    }
  }
  Bipartition p;
  for (int x : members) {
    (dist[x][sa] <= dist[x][sb] ? p.first : p.second).push_back(x);
  }
  Canonicalize(p);
  p.cost = MedoidCost(dist, p.first) + MedoidCost(dist, p.second);
  return p;
}

Bipartition TwoMeansBisection(const std::vector<Point>& positions,
                              const std::vector<int>& members, uint64_t seed) {
  const size_t n = members.size();
  if (n < 2) throw InvalidInput("bisection needs at least two members");
  if (n == 2) {
    Bipartition p{{members[0]}, {members[1]}, 0.0};
    return p;
  }
  constexpr int kRestarts = 8;
  constexpr int kMaxIterations = 100;
  auto sq = [&](int x, const Point& c) {
    const double dx = positions[x].x - c.x, dy = positions[x].y - c.y;
    return dx * dx + dy * dy;
  };
  Bipartition best;
  best.cost = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < kRestarts; ++restart) {
    CounterRng rng(seed, RngStream::kClustering,
                   (static_cast<uint64_t>(MaskOf(members).bits()) << 8) | restart);
    // k-means++ seeding.
    Point centers[2];
    centers[0] = positions[members[rng() % n]];
    double total = 0.0;
    std::vector<double> weight(n);
    for (size_t i = 0; i < n; ++i) total += weight[i] = sq(members[i], centers[0]);
    if (total <= 0.0) {
      centers[1] = positions[members[(rng() % (n - 1) + 1) % n]];
    } else {
      double pick = rng.Uniform() * total;
      size_t chosen = n - 1;
      for (size_t i = 0; i < n; ++i) {
        pick -= weight[i];
        if (pick < 0.0) {
          chosen = i;
          break;
        }
      }
      centers[1] = positions[members[chosen]];
    }
    std::vector<int> assign(n, -1);
    for (int it = 0; it < kMaxIterations; ++it) {
      bool changed = false;
      for (size_t i = 0; i < n; ++i) {
        const int a = sq(members[i], centers[0]) <= sq(members[i], centers[1]) ? 0 : 1;
        if (a != assign[i]) {
          assign[i] = a;
          changed = true;
        }
      }
      // Re-seed an empty cluster with the point farthest from the other center.
      for (int c = 0; c < 2; ++c) {
        if (std::count(assign.begin(), assign.end(), c) == 0) {
          size_t far = 0;
          for (size_t i = 1; i < n; ++i) {
            if (sq(members[i], centers[1 - c]) > sq(members[far], centers[1 - c])) far = i;
          }
          assign[far] = c;
          changed = true;
        }
      }
      for (int c = 0; c < 2; ++c) {
        Point sum;
        int cnt = 0;
        for (size_t i = 0; i < n; ++i) {
          if (assign[i] != c) continue;
          sum.x += positions[members[i]].x;
          sum.y += positions[members[i]].y;
          ++cnt;
        }
        centers[c] = {sum.x / cnt, sum.y / cnt};
      }
      if (!changed) break;
    }
    Bipartition p;
    for (size_t i = 0; i < n; ++i) (assign[i] == 0 ? p.first : p.second).push_back(members[i]);
    if (p.first.empty() || p.second.empty()) continue;
    Canonicalize(p);
    p.cost = SumSquaredError(positions, p.first) + SumSquaredError(positions, p.second);
    if (p.cost < best.cost) best = std::move(p);
  }
  return best;
}

namespace {

struct TreeBuilder {
  const std::vector<std::vector<double>>* dist = nullptr;
  const std::vector<Point>* positions = nullptr;  // set for the geographic metric
  uint64_t seed = 0;

  Bipartition Bisect(const std::vector<int>& members) const {
    if (positions) return TwoMeansBisection(*positions, members, seed);
    return MedoidBisection(*dist, members);
  }

  double SplitCost(const Bipartition& p) const {
    if (positions) return SumSquaredError(*positions, p.first) + SumSquaredError(*positions, p.second);
    return MedoidCost(*dist, p.first) + MedoidCost(*dist, p.second);
  }

  int Build(DupTree& tree, const std::vector<int>& members) const {
    const int self = tree.AddNode(MaskOf(members));
    if (members.size() == 1) return self;
    const Bipartition p = Bisect(members);
    Attach(tree, self, p);
    return self;
  }

  void Attach(DupTree& tree, int parent, const Bipartition& p) const {
    const int a = Build(tree, p.first);
    const int b = Build(tree, p.second);
    tree.SetChildren(parent, a, b);
  }
};

}  // namespace

std::vector<DupTree> BuildDuplicationTrees(const Network& network, int num_trees,
                                           ClusterMetric metric, uint64_t seed) {
  const int d = network.num_destinations();
  const uint64_t max_trees = d == 1 ? 1 : (uint64_t{1} << (d - 1)) - 1;
  if (num_trees < 1 || static_cast<uint64_t>(num_trees) > max_trees) {
    throw InvalidInput("requested " + std::to_string(num_trees) + " duplication trees; " +
                       std::to_string(d) + " destinations allow between 1 and " +
                       std::to_string(max_trees));
  }
  const auto dist = DestinationDistances(network, metric);
  std::vector<Point> positions;
  TreeBuilder builder;
  builder.dist = &dist;
  builder.seed = seed;
  if (metric == ClusterMetric::kGeographic) {
    for (int v : network.destinations()) positions.push_back(*network.node(v).position);
    builder.positions = &positions;
  }
  std::vector<int> all(d);
  std::iota(all.begin(), all.end(), 0);

  std::vector<DupTree> trees;
  DupTree first(d);
  builder.Build(first, all);
  trees.push_back(std::move(first));
  if (num_trees == 1) return trees;

  // Remaining trees: cheapest top-level splits other than the one used above.
  const uint32_t top_first = trees[0].node(trees[0].root().first_child).status.bits();
  std::vector<Bipartition> splits;
  const uint32_t full = (uint32_t{1} << d) - 1;
  for (uint32_t mask = 1; mask < full; mask += 2) {
    if (mask == top_first) continue;
    Bipartition p = FromMask(all, mask);
    p.cost = builder.SplitCost(p);
    splits.push_back(std::move(p));
  }
  std::stable_sort(splits.begin(), splits.end(),
                   [](const Bipartition& a, const Bipartition& b) { return a.cost < b.cost; });
  for (int t = 1; t < num_trees; ++t) {
    DupTree tree(d);
    const int root = tree.AddNode(DupStatus::AllOnes(d));
    builder.Attach(tree, root, splits[t - 1]);
    trees.push_back(std::move(tree));
  }
  return trees;
}

std::vector<DupChoice> TreeChoices(const DupTree& tree) {
  std::set<DupChoice> out;
  for (int i = 0; i < tree.size(); ++i) {
    const auto& n = tree.node(i);
    out.insert({n.status, n.status});
    if (!n.is_leaf()) {
      out.insert({n.status, tree.node(n.first_child).status});
      out.insert({n.status, tree.node(n.second_child).status});
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace mcnet
