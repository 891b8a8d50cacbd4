#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bbbd/evaluation.hpp"
#include "bbbd/instance.hpp"

namespace bbbd {

// One image's worth of input: the image extent, its instances, and the
// optional ground truth aligned with the instance order.
struct Scene {
    std::int64_t image_id = 0;
    int width = 0;
    int height = 0;
    std::vector<Instance> instances;
    std::optional<GroundTruth> gt;

    friend bool operator==(const Scene&, const Scene&) = default;
};

} // namespace bbbd
