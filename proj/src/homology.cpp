#include "tdagait/homology.hpp"

#include <algorithm>
#include <bitset>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>

#include "tdagait/error.hpp"
#include "tdagait/kernels.hpp"

namespace tdagait {

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n_ == 0) throw Error(ErrorCode::kEmptyCloud, "distance matrix over zero points");
  if (entries_.size() != n_ * n_) {
    throw Error(ErrorCode::kValidation, "distance matrix needs n*n entries");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (entries_[i * n_ + i] != 0.0) {
      throw Error(ErrorCode::kValidation, "distance matrix diagonal must be zero");
    }
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double v = entries_[i * n_ + j];
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::kValidation, "distances must be finite and nonnegative");
      }
      if (v != entries_[j * n_ + i]) {
        throw Error(ErrorCode::kValidation, "distance matrix must be symmetric");
      }
    }
  }
}

double DistanceMatrix::max_entry() const {
  return *std::max_element(entries_.begin(), entries_.end());
}

DistanceMatrix pairwise_distances(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  if (n == 0) throw Error(ErrorCode::kEmptyCloud, "point cloud is empty");
  const std::size_t dim = cloud.dim;
  std::vector<double> columns(n * dim);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < dim; ++k) columns[k * n + j] = cloud.coords[j * dim + k];
  }
  std::vector<double> entries(n * n, 0.0);
  std::vector<double> row(n);
  const auto& kt = kernels::active();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    kt.distance_row(columns, n, dim, i, i + 1, std::span<double>(row).first(n - i - 1));
    for (std::size_t j = i + 1; j < n; ++j) {
      entries[i * n + j] = row[j - i - 1];
      entries[j * n + i] = row[j - i - 1];
    }
  }
  return DistanceMatrix(n, std::move(entries));
}

std::vector<PersistencePair> PersistenceDiagram::in_degree(int degree) const {
  std::vector<PersistencePair> out;
  for (const auto& p : pairs) {
    if (p.degree == degree) out.push_back(p);
  }
  return out;
}

std::vector<PersistencePair> PersistenceDiagram::sorted_pairs() const {
  auto out = pairs;
  std::sort(out.begin(), out.end());
  return out;
}

bool PersistenceDiagram::has_infinite() const {
  return std::any_of(pairs.begin(), pairs.end(),
                     [](const PersistencePair& p) { return std::isinf(p.death); });
}

bool same_pairs(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  return a.sorted_pairs() == b.sorted_pairs();
}

namespace {

struct Edge {
  double weight;
  std::uint32_t u, v;  // u < v
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

// Sorted vector of row indices; addition over Z/2 is symmetric difference.
using Column = std::vector<std::uint32_t>;

void add_column(Column& target, const Column& source) {
  Column merged;
  merged.reserve(target.size() + source.size());
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                std::back_inserter(merged));
  target.swap(merged);
}

}  // namespace

PersistenceDiagram rips_persistence(const DistanceMatrix& dm, int max_degree) {
  if (max_degree < 0 || max_degree > 1) {
    throw Error(ErrorCode::kDegreeUnsupported,
                "max_degree " + std::to_string(max_degree) + " (only 0 and 1 are supported)");
  }
  const std::size_t n = dm.size();
  PersistenceDiagram dgm;
  dgm.max_filtration = dm.max_entry();

  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint32_t v = u + 1; v < n; ++v) edges.push_back({dm(u, v), u, v});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });

  // Degree 0: every merge kills the younger component at the edge weight.
  std::vector<bool> negative(edges.size(), false);
  UnionFind components(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (components.unite(edges[e].u, edges[e].v)) {
      negative[e] = true;
      if (edges[e].weight > 0.0) dgm.pairs.push_back({0, 0.0, edges[e].weight});
    }
  }
  dgm.pairs.push_back({0, 0.0, kInfinity});
  if (max_degree < 1 || n < 3) return dgm;

  // Degree 1: rows are edges in filtration order, columns are triangles.
  std::vector<std::uint32_t> edge_rank(n * n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    edge_rank[edges[e].u * n + edges[e].v] = static_cast<std::uint32_t>(e);
  }
  const auto rank_of = [&](std::uint32_t a, std::uint32_t b) { return edge_rank[a * n + b]; };

  struct Triangle {
    double filtration;
    std::uint32_t a, b, c;
  };
  std::vector<Triangle> triangles;
  triangles.reserve(n * (n - 1) * (n - 2) / 6);
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      for (std::uint32_t c = b + 1; c < n; ++c) {
        triangles.push_back({std::max({dm(a, b), dm(a, c), dm(b, c)}), a, b, c});
      }
    }
  }
  std::sort(triangles.begin(), triangles.end(), [](const Triangle& x, const Triangle& y) {
    if (x.filtration != y.filtration) return x.filtration < y.filtration;
    return std::tie(x.a, x.b, x.c) < std::tie(y.a, y.b, y.c);
  });

  const std::size_t cycles = edges.size() - static_cast<std::size_t>(
                                                std::count(negative.begin(), negative.end(), true));
  std::size_t killed = 0;
  std::unordered_map<std::uint32_t, Column> reduced_by_pivot;
  std::vector<bool> edge_paired(edges.size(), false);
  for (const Triangle& tri : triangles) {
    if (killed == cycles) break;
    Column col = {rank_of(tri.a, tri.b), rank_of(tri.a, tri.c), rank_of(tri.b, tri.c)};
    std::sort(col.begin(), col.end());
    while (!col.empty()) {
      const auto it = reduced_by_pivot.find(col.back());
      if (it == reduced_by_pivot.end()) break;
      add_column(col, it->second);
    }
    if (col.empty()) continue;
    const std::uint32_t pivot = col.back();
    edge_paired[pivot] = true;
    ++killed;
    const double birth = edges[pivot].weight;
    if (tri.filtration > birth) dgm.pairs.push_back({1, birth, tri.filtration});
    reduced_by_pivot.emplace(pivot, std::move(col));
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!negative[e] && !edge_paired[e]) dgm.pairs.push_back({1, edges[e].weight, kInfinity});
  }
  return dgm;
}

PersistenceDiagram brute_force_persistence(const DistanceMatrix& dm) {
  const std::size_t n = dm.size();
  if (n > kBruteForceMaxPoints) {
    throw Error(ErrorCode::kTooLarge, std::to_string(n) + " points exceed the brute-force limit of " +
                                          std::to_string(kBruteForceMaxPoints));
  }
  struct Simplex {
    double filtration;
    int dim;
    std::vector<std::size_t> vertices;
  };
  std::vector<Simplex> simplices;
  for (std::size_t a = 0; a < n; ++a) simplices.push_back({0.0, 0, {a}});
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) simplices.push_back({dm(a, b), 1, {a, b}});
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        simplices.push_back({std::max({dm(a, b), dm(a, c), dm(b, c)}), 2, {a, b, c}});
      }
    }
  }
  std::sort(simplices.begin(), simplices.end(), [](const Simplex& x, const Simplex& y) {
    if (x.filtration != y.filtration) return x.filtration < y.filtration;
    if (x.dim != y.dim) return x.dim < y.dim;
    return x.vertices < y.vertices;
  });

  // 12 + 66 + 220 simplices at most.
  constexpr std::size_t kMaxSimplices = 298;
  using Bits = std::bitset<kMaxSimplices>;
  const std::size_t total = simplices.size();
  std::vector<Bits> boundary(total);
  for (std::size_t col = 0; col < total; ++col) {
    const auto& s = simplices[col];
    if (s.dim == 0) continue;
    for (std::size_t drop = 0; drop < s.vertices.size(); ++drop) {
      std::vector<std::size_t> face;
      for (std::size_t k = 0; k < s.vertices.size(); ++k) {
        if (k != drop) face.push_back(s.vertices[k]);
      }
      for (std::size_t row = 0; row < total; ++row) {
        if (simplices[row].vertices == face) {
          boundary[col].set(row);
          break;
        }
      }
    }
  }

  const auto low = [](const Bits& bits) -> long {
    for (long r = static_cast<long>(kMaxSimplices) - 1; r >= 0; --r) {
      if (bits.test(static_cast<std::size_t>(r))) return r;
    }
    return -1;
  };
  std::vector<long> low_of(total, -1);
  std::vector<long> column_with_low(total, -1);
  for (std::size_t col = 0; col < total; ++col) {
    long l = low(boundary[col]);
    while (l >= 0 && column_with_low[static_cast<std::size_t>(l)] >= 0) {
      boundary[col] ^= boundary[static_cast<std::size_t>(column_with_low[static_cast<std::size_t>(l)])];
      l = low(boundary[col]);
    }
    low_of[col] = l;
    if (l >= 0) column_with_low[static_cast<std::size_t>(l)] = static_cast<long>(col);
  }

  PersistenceDiagram dgm;
  dgm.max_filtration = dm.max_entry();
  for (std::size_t col = 0; col < total; ++col) {
    if (low_of[col] >= 0) {
      const auto& born = simplices[static_cast<std::size_t>(low_of[col])];
      if (born.dim <= 1 && simplices[col].filtration > born.filtration) {
        dgm.pairs.push_back({born.dim, born.filtration, simplices[col].filtration});
      }
    } else if (simplices[col].dim <= 1 && column_with_low[col] < 0) {
      dgm.pairs.push_back({simplices[col].dim, simplices[col].filtration, kInfinity});
    }
  }
  return dgm;
}

PersistenceDiagram cap_infinite(const PersistenceDiagram& dgm) {
  PersistenceDiagram out;
  out.max_filtration = dgm.max_filtration;
  for (PersistencePair p : dgm.pairs) {
    if (std::isinf(p.death)) p.death = dgm.max_filtration;
    if (p.death > p.birth) out.pairs.push_back(p);
  }
  return out;
}

void write_diagram(std::ostream& out, const PersistenceDiagram& dgm) {
  if (dgm.has_infinite()) {
    throw Error(ErrorCode::kValidation, "diagram must be capped before it is written");
  }
  char buf[64];
  const auto num = [&](double v) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  };
  out << "degree,birth,death\n";
  for (const auto& p : dgm.sorted_pairs()) {
    out << p.degree << ',' << num(p.birth) << ',' << num(p.death) << '\n';
  }
}

}  // namespace tdagait
