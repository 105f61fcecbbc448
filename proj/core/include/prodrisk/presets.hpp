#pragma once

#include <optional>
#include <string_view>

#include "prodrisk/config.hpp"

namespace prodrisk {

/// Seven-processor diamond network with load-dependent failures.
///
/// Nodes: 1 -e1-> 2; node 2 splits into e2 (share alpha1) and e3; node 3
/// (end of e2) splits into e5 (share alpha2) and e4; e3 and e4 merge at
/// node 4 into e6; e5 and e6 merge at node 5 into e7, which exits at node 6.
/// Every processor has unit length and velocity; cells = 1 / dt so each
/// step moves goods exactly one cell.
struct DiamondOptions {
    double alpha1 = 0.5;
    double alpha2 = 0.5;
    double dt = 0.05;
    double horizon = 10.0;
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
};

RunConfig diamond_preset(const DiamondOptions& options = {});

/// Node ids carrying the two routing decisions of the diamond network.
inline constexpr int kDiamondAlpha1Node = 2;
inline constexpr int kDiamondAlpha2Node = 3;

/// Two processors in series whose capacities are worker clusters
/// (MTBF 80/50, MRT 10/20), constant inflow 10, dt = dx = 1, T = 365.
struct Serial2Options {
    int workers1 = 10;
    int workers2 = 12;
    double horizon = 365.0;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
};

RunConfig serial2_preset(const Serial2Options& options = {});

/// Looks up a preset by name ("diamond" or "serial2") with default options.
std::optional<RunConfig> preset_by_name(std::string_view name);

}  // namespace prodrisk
