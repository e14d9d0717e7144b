#ifndef CGCLAB_DATAGEN_HPP
#define CGCLAB_DATAGEN_HPP

#include <cstdint>
#include <vector>

#include "cgclab/core.hpp"
#include "cgclab/matrix.hpp"

namespace cgclab {

// Synthetic identity dataset: identities are anchor directions on the unit
// sphere, samples are normalized noisy perturbations. A boundary_fraction
// subset gets the wider boundary_sigma noise and plays the role of
// low-confidence samples.
struct DatasetSpec {
    int num_identities = 20;
    int samples_per_identity = 30;
    int dim = 32;
    double noise_sigma = 0.25;
    double boundary_fraction = 0.15;
    double boundary_sigma = 0.5;
    int num_cameras = 3;
    double camera_bias_sigma = 0.1;
    std::uint64_t seed = 1;

    int total_samples() const { return num_identities * samples_per_identity; }
};

// Throws ConfigError on invalid fields.
void validate(const DatasetSpec& spec);

struct Dataset {
    Matrix observations;            // N x d, unit-norm rows
    GroundTruth ground_truth;
    std::vector<bool> boundary_mask;  // generation-time flag; evaluation only
    DatasetSpec spec;
};

Dataset generate(const DatasetSpec& spec);

struct QueryGallerySplit {
    std::vector<std::size_t> query;
    std::vector<std::size_t> gallery;
};

// Disjoint index sets covering all samples; every query identity keeps at
// least one gallery match. Throws SplitError if an identity has one sample.
QueryGallerySplit split_query_gallery(const GroundTruth& gt, double query_fraction,
                                      std::uint64_t seed);

}  // namespace cgclab

#endif  // CGCLAB_DATAGEN_HPP
