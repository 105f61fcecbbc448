#pragma once

#include <variant>
#include <vector>

namespace prodrisk {

/// Failure/repair rates driven by the load on a processor: repairs slow down
/// with work in progress, breakdowns scale with utilization.
struct LoadDependentParams {
    double repair_max = 0.0;
    double repair_min = 0.0;
    double down = 0.0;

    friend bool operator==(const LoadDependentParams&, const LoadDependentParams&) = default;
};

/// A processor whose capacity is the number of available workers out of
/// `workers`; each worker switches off -> on at `rate_on` and on -> off at
/// `rate_off`, independently of the others.
struct ClusterParams {
    int workers = 1;
    double rate_on = 0.0;   // 1 / mean repair time
    double rate_off = 0.0;  // 1 / mean time between failures

    friend bool operator==(const ClusterParams&, const ClusterParams&) = default;
};

struct LoadDependentModel {
    std::vector<LoadDependentParams> edges;

    friend bool operator==(const LoadDependentModel&, const LoadDependentModel&) = default;
};

struct ClusterModel {
    std::vector<ClusterParams> edges;

    friend bool operator==(const ClusterModel&, const ClusterModel&) = default;
};

using RateModelSpec = std::variant<LoadDependentModel, ClusterModel>;

inline bool is_cluster(const RateModelSpec& model) {
    return std::holds_alternative<ClusterModel>(model);
}

}  // namespace prodrisk
