// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include "gknn/knn_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "gknn/rng.hpp"

namespace gknn {
namespace {

struct Candidate {
  double distance;
  std::size_t id;
};

bool closer(const Candidate& a, const Candidate& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
}

NeighborSet to_neighbor_set(std::vector<Candidate> best, std::size_t k,
                            const std::vector<TokenId>& values) {
  NeighborSet out;
  out.k_requested = k;
  out.entries.reserve(best.size());
  for (const auto& c : best) out.entries.push_back({c.id, c.distance, values[c.id]});
  return out;
}

}  // namespace

double knn_distance(const float* key, const double* query, Eigen::Index dim) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  Eigen::Index i = 0;
  for (; i + 4 <= dim; i += 4) {
    for (int l = 0; l < 4; ++l) {
      const double d = static_cast<double>(key[i + l]) - query[i + l];
      lane[l] += d * d;
    }
  }
  for (; i < dim; ++i) {
    const double d = static_cast<double>(key[i]) - query[i];
    lane[0] += d * d;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

NeighborSet search_brute_force(const Datastore& store, const QueryRef& query,
                               std::size_t k) {
  if (k == 0) throw Error(ErrorKind::kConfig, "k must be at least 1");
  if (query.size() != store.dim()) {
    throw Error(ErrorKind::kShape, "query dimension " + std::to_string(query.size()) +
                                       " != store dimension " +
                                       std::to_string(store.dim()));
  }
  if (store.count() == 0) throw Error(ErrorKind::kEmptyStore, "datastore is empty");

  const Eigen::VectorXd q = query.cast<double>();
  const FloatMatrix& keys = store.keys();
  std::vector<Candidate> all(store.count());
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i] = {knn_distance(keys.row(static_cast<Eigen::Index>(i)).data(), q.data(),
                           store.dim()),
              i};
  }
  const std::size_t take = std::min(k, all.size());
  if (take < all.size()) {
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take),
                     all.end(), closer);
    all.resize(take);
  }
  std::sort(all.begin(), all.end(), closer);
  return to_neighbor_set(std::move(all), k, store.values());
}

KnnIndex::KnnIndex(std::shared_ptr<const Datastore> store, IndexParams params)
    : store_(std::move(store)) {
  const FloatMatrix& keys = store_->keys();
  const std::size_t count = store_->count();
  const Eigen::Index dim = store_->dim();

  std::size_t n_parts = params.n_partitions;
  if (n_parts == 0) {
    n_parts = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(count)) / 2.0));
  }
  n_parts = std::clamp<std::size_t>(n_parts, 1, std::max<std::size_t>(count, 1));

  // Seeded k-means: initial centroids are distinct rows drawn by a partial
  // Fisher-Yates shuffle.
  centroids_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_parts), dim);
  std::vector<std::size_t> assignment(count, 0);
  if (count > 0) {
    CounterRng rng(params.seed);
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t c = 0; c < n_parts; ++c) {
      const std::size_t j = c + static_cast<std::size_t>(rng.below(count - c));
      std::swap(order[c], order[j]);
      centroids_.row(static_cast<Eigen::Index>(c)) =
          keys.row(static_cast<Eigen::Index>(order[c])).cast<double>();
    }

    for (int iter = 0; iter <= params.kmeans_iterations; ++iter) {
      for (std::size_t i = 0; i < count; ++i) {
        const Eigen::VectorXd key = keys.row(static_cast<Eigen::Index>(i)).cast<double>().transpose();
        Eigen::Index best = 0;
        (centroids_.rowwise() - key.transpose()).rowwise().squaredNorm().minCoeff(&best);
        assignment[i] = static_cast<std::size_t>(best);
      }
      if (iter == params.kmeans_iterations) break;
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(centroids_.rows(), dim);
      Eigen::VectorXd sizes = Eigen::VectorXd::Zero(centroids_.rows());
      for (std::size_t i = 0; i < count; ++i) {
        const auto c = static_cast<Eigen::Index>(assignment[i]);
        sums.row(c) += keys.row(static_cast<Eigen::Index>(i)).cast<double>();
        sizes[c] += 1.0;
      }
      for (Eigen::Index c = 0; c < centroids_.rows(); ++c) {
        if (sizes[c] > 0.0) centroids_.row(c) = sums.row(c) / sizes[c];
      }
    }
  }

  partitions_.resize(n_parts);
  std::vector<std::vector<std::size_t>> members(n_parts);
  for (std::size_t i = 0; i < count; ++i) members[assignment[i]].push_back(i);
  for (std::size_t c = 0; c < n_parts; ++c) {
    Partition& part = partitions_[c];
    part.ids = std::move(members[c]);
    part.keys.resize(static_cast<Eigen::Index>(part.ids.size()), dim);
    const Eigen::VectorXd centroid = centroids_.row(static_cast<Eigen::Index>(c)).transpose();
    for (std::size_t r = 0; r < part.ids.size(); ++r) {
      part.keys.row(static_cast<Eigen::Index>(r)) =
          keys.row(static_cast<Eigen::Index>(part.ids[r]));
      part.radius = std::max(
          part.radius,
          std::sqrt(knn_distance(part.keys.row(static_cast<Eigen::Index>(r)).data(),
                                 centroid.data(), dim)));
    }
  }
}

Eigen::VectorXd KnnIndex::prepare(const QueryRef& query, std::size_t k) const {
  if (k == 0) throw Error(ErrorKind::kConfig, "k must be at least 1");
  if (query.size() != store_->dim()) {
    throw Error(ErrorKind::kShape, "query dimension " + std::to_string(query.size()) +
                                       " != store dimension " +
                                       std::to_string(store_->dim()));
  }
  if (store_->count() == 0) throw Error(ErrorKind::kEmptyStore, "datastore is empty");
  return query.cast<double>();
}

NeighborSet KnnIndex::search_exact(const QueryRef& query, std::size_t k) const {
  return search_brute_force(*store_, query, k);
}

NeighborSet KnnIndex::search(const QueryRef& query, std::size_t k) const {
  const Eigen::VectorXd q = prepare(query, k);
  const Eigen::Index dim = store_->dim();
  const std::size_t take = std::min(k, store_->count());

  // Nearest partitions first so the heap bound tightens early.
  std::vector<std::pair<double, std::size_t>> visit(partitions_.size());
  const Eigen::VectorXd centroid_dist =
      (centroids_.rowwise() - q.transpose()).rowwise().squaredNorm();
  for (std::size_t c = 0; c < partitions_.size(); ++c) {
    visit[c] = {centroid_dist[static_cast<Eigen::Index>(c)], c};
  }
  std::sort(visit.begin(), visit.end());

  auto worse = [](const Candidate& a, const Candidate& b) { return closer(a, b); };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> heap(worse);
  for (const auto& [centroid_d2, c] : visit) {
    const Partition& part = partitions_[c];
    if (heap.size() == take) {
      // Triangle inequality: every member lies at least |q - mu| - radius
      // away. The slack keeps rounding from ever skipping a tie.
      const double lower = std::sqrt(centroid_d2) - part.radius;
      const double bound = std::sqrt(heap.top().distance);
      if (lower > bound * (1.0 + 1e-9) + 1e-9) continue;
    }
    const float* row = part.keys.data();
    for (std::size_t r = 0; r < part.ids.size(); ++r, row += dim) {
      const Candidate cand{knn_distance(row, q.data(), dim), part.ids[r]};
      if (heap.size() < take) {
        heap.push(cand);
      } else if (closer(cand, heap.top())) {
        heap.pop();
        heap.push(cand);
      }
    }
  }

  std::vector<Candidate> best(heap.size());
  for (auto it = best.rbegin(); it != best.rend(); ++it) {
    *it = heap.top();
    heap.pop();
  }
  return to_neighbor_set(std::move(best), k, store_->values());
}

ProbDist knn_distribution(const NeighborSet& neighbors, std::size_t vocab_size,
                          double tau) {
  if (neighbors.empty()) {
    throw Error(ErrorKind::kEmptyNeighbors, "no neighbors to aggregate");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorKind::kConfig, "tau must be positive and finite");
  }
  double nearest = neighbors.entries.front().distance;
  for (const auto& n : neighbors.entries) nearest = std::min(nearest, n.distance);

  Eigen::VectorXd mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocab_size));
  for (const auto& n : neighbors.entries) {
    if (n.value >= vocab_size) {
      throw Error(ErrorKind::kShape, "neighbor value " + std::to_string(n.value) +
                                         " outside vocabulary of size " +
                                         std::to_string(vocab_size));
    }
    mass[n.value] += std::exp(-(n.distance - nearest) / tau);
  }
  return normalize(mass);
}

}  // namespace gknn
