#ifndef CGCLAB_ERRORS_HPP
#define CGCLAB_ERRORS_HPP

#include <stdexcept>

namespace cgclab {

struct ZeroVector : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SplitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sample sits in a size-1 cluster; callers map this to silhouette 0.
struct SingletonCluster : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Partition has a single cluster, so no neighboring cluster exists.
struct SingleClusterPartition : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyPartition : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyBank : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct LabelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cluster has no boundary samples; excluded from the epoch ICS mean.
struct IcsUndefined : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cgclab

#endif  // CGCLAB_ERRORS_HPP
