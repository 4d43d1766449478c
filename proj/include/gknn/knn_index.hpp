// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "gknn/core_types.hpp"
#include "gknn/datastore.hpp"

namespace gknn {

using FrameEmbedding = Eigen::VectorXf;
using QueryRef = Eigen::Ref<const Eigen::VectorXf>;

/// Distance used for retrieval, gating and kNN weights: squared Euclidean,
/// accumulated in double over four fixed lanes. Both search paths call this,
/// so their distances agree bit-for-bit.
double knn_distance(const float* key, const double* query, Eigen::Index dim);

struct Neighbor {
  std::size_t id = 0;
  double distance = 0.0;
  TokenId value = 0;

  bool operator==(const Neighbor&) const = default;
};

/// Ascending by distance, ties by ascending entry id.
struct NeighborSet {
  std::vector<Neighbor> entries;
  std::size_t k_requested = 0;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  bool operator==(const NeighborSet&) const = default;
};

struct IndexParams {
  /// 0 picks roughly sqrt(count) / 2.
  std::size_t n_partitions = 0;
  std::uint64_t seed = 0x6b6e6e;
  int kmeans_iterations = 8;
};

/// Exact k-nearest-neighbor search over one datastore.
///
/// Keys are regrouped into k-means partitions so each partition is scanned
/// from contiguous memory. Every partition is probed; the result equals the
/// full scan exactly.
class KnnIndex {
 public:
  explicit KnnIndex(std::shared_ptr<const Datastore> store, IndexParams params = {});
  explicit KnnIndex(Datastore store, IndexParams params = {})
      : KnnIndex(std::make_shared<const Datastore>(std::move(store)), params) {}

  const Datastore& store() const { return *store_; }
  std::size_t partitions() const { return partitions_.size(); }

  /// Partitioned scan.
  NeighborSet search(const QueryRef& query, std::size_t k) const;
  /// Naive full scan with selection.
  NeighborSet search_exact(const QueryRef& query, std::size_t k) const;

 private:
  struct Partition {
    FloatMatrix keys;
    std::vector<std::size_t> ids;
    double radius = 0.0;  // max L2 distance from the centroid to a member
  };

  Eigen::VectorXd prepare(const QueryRef& query, std::size_t k) const;

  std::shared_ptr<const Datastore> store_;
  Eigen::MatrixXd centroids_;  // partitions x dim
  std::vector<Partition> partitions_;
};

/// Free-function full scan, for callers without an index.
NeighborSet search_brute_force(const Datastore& store, const QueryRef& query,
                               std::size_t k);

/// P(y) proportional to the sum of exp(-distance / tau) over neighbors with
/// value y. Weights are taken relative to the nearest neighbor, which leaves
/// the distribution unchanged and keeps it finite for large distances.
/// Throws kEmptyNeighbors for an empty set, kConfig for tau <= 0.
ProbDist knn_distribution(const NeighborSet& neighbors, std::size_t vocab_size,
                          double tau);

}  // namespace gknn
