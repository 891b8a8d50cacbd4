#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bbbd/bitmask.hpp"
#include "bbbd/box.hpp"

namespace bbbd {

// One detected or annotated object: its visible mask at full image extent
// plus the bounding box the detector reported. The box always covers the
// mask support; it is empty only for the degenerate fully-occluded case
// where the visible mask itself has no pixels.
struct Instance {
    std::int64_t id = 0;
    BBox bbox;
    Bitmask mask;
    std::optional<std::string> category;

    friend bool operator==(const Instance&, const Instance&) = default;
};

} // namespace bbbd
