#pragma once
// Vietoris-Rips persistent homology in degrees 0 and 1 over Z/2.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "tdagait/ingest.hpp"

namespace tdagait {

class DistanceMatrix {
 public:
  /// Validates symmetry, zero diagonal, finiteness and nonnegativity.
  DistanceMatrix(std::size_t n, std::vector<double> entries);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  double max_entry() const;
  std::span<const double> entries() const { return entries_; }

 private:
  std::size_t n_;
  std::vector<double> entries_;
};

/// Euclidean distances. Each unordered pair is computed once and mirrored.
DistanceMatrix pairwise_distances(const PointCloud& cloud);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PersistencePair {
  int degree = 0;
  double birth = 0.0;
  double death = 0.0;  // kInfinity for essential classes

  double persistence() const { return death - birth; }
  bool operator==(const PersistencePair&) const = default;
  auto operator<=>(const PersistencePair&) const = default;
};

struct PersistenceDiagram {
  std::vector<PersistencePair> pairs;
  double max_filtration = 0.0;

  std::vector<PersistencePair> in_degree(int degree) const;
  /// Pairs sorted by (degree, birth, death); the canonical multiset form.
  std::vector<PersistencePair> sorted_pairs() const;
  bool has_infinite() const;
};

/// Multiset equality over (degree, birth, death).
bool same_pairs(const PersistenceDiagram& a, const PersistenceDiagram& b);

/// Degree 0 from union-find over edges sorted by (weight, i, j); degree 1
/// from reducing the triangle boundary columns against positive edges, with
/// early exit once every cycle has died. Zero-persistence pairs are dropped.
PersistenceDiagram rips_persistence(const DistanceMatrix& dm, int max_degree = 1);

/// Textbook boundary-matrix reduction over the full 2-skeleton. Limited to
/// 12 points; used to check rips_persistence.
PersistenceDiagram brute_force_persistence(const DistanceMatrix& dm);

inline constexpr std::size_t kBruteForceMaxPoints = 12;

/// Replaces infinite deaths by max_filtration and drops pairs that become
/// zero-persistence.
PersistenceDiagram cap_infinite(const PersistenceDiagram& dgm);

/// `degree,birth,death` rows with a header. Throws ValidationError if the
/// diagram still holds an infinite death.
void write_diagram(std::ostream& out, const PersistenceDiagram& dgm);

}  // namespace tdagait
