// Generates one dataset, clusters it on the CPU backends and checks that the
// multithreaded labels match the single-threaded reference.

#include <iostream>

#include "oclmine/oclmine.hpp"

int main() {
  using namespace oclmine;

  const DatasetSpec spec{2, {256, 256, 256}, 42};
  const Dataset ds = generate(spec).dataset;

  const DbscanParams dp = derive_dbscan_params(ds.features());
  const auto reference = dbscan_single(ds, dp);
  const auto parallel = dbscan_parallel(ds, dp, nullptr, WorkerPoolConfig{4});
  std::cout << "dbscan: " << count_clusters(reference) << " clusters, parallel "
            << (bench::verify_dbscan(reference, parallel.value) ? "matches" : "differs") << ", wall "
            << parallel.timing.wall_ns << " ns, thread setup " << parallel.timing.overhead_ns() << " ns\n";

  KmeansParams kp;
  kp.k = 3;
  const auto km = kmeans_single(ds, kp, 7);
  std::cout << "kmeans: " << km.iterations << " iterations, converged " << std::boolalpha << km.converged
            << ", WCSS " << within_cluster_ss(ds, km.labels, km.centers) << '\n';
  return 0;
}
