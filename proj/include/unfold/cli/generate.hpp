#pragma once

#include "unfold/cli/dataset.hpp"

#include <string>
#include <vector>

namespace unfold::cli {

/// Synthetic manifolds with ground truth:
///   swiss_roll           3-d roll, angle t in [1.5 pi, 3 pi], height in [0, 10]; truth (t, height)
///   s_curve              3-d S shape; truth (t, height)
///   ring                 unit circle in the first two of three dims; truth (cos, sin)
///   circle_images_proxy  16x16 images of a blob moving round a circle; truth (cos, sin)
/// Points of ring and circle_images_proxy follow the circle in row order.
/// Throws InvalidArgument for an unknown name or n < 10.
Dataset generate(const std::string& name, Index n, double noise, unsigned long long seed);

const std::vector<std::string>& generator_names();

}  // namespace unfold::cli
