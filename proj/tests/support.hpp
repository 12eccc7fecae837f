#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "ccasim/harness.hpp"

namespace ccasim::testing {

struct TrafficResult {
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t cycles = 0;
  std::uint64_t stalled_cycles = 0;  // began with traffic in flight, nothing moved
  std::uint64_t misrouted = 0;       // wrong cell or non-minimal hop count
  std::uint64_t buffer_violations = 0;
};

/// Random point-to-point traffic on a bare network. Each source retries its
/// next message every cycle until admitted.
TrafficResult run_random_traffic(const ChipConfig& chip, std::uint32_t messages, std::uint64_t seed,
                                 std::uint64_t cycle_limit = 1'000'000);

/// A built store plus simulator for one application.
struct AppRun {
  std::unique_ptr<GraphStore> store;
  std::unique_ptr<Simulator> sim;
  BuildReport build;
};

AppRun make_run(const ChipConfig& chip, const EdgeList& g, const StructureParams& structure,
                const AppParams& app, RuntimeOptions options = {});

ChipConfig chip(std::int32_t dim, Topology topo = Topology::Mesh);
StructureParams structure(std::uint32_t rpvo_max);

EdgeList rmat10(std::uint64_t seed = 1);
EdgeList er1000(std::uint64_t seed = 1);

}  // namespace ccasim::testing
