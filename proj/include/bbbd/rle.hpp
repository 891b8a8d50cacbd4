#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bbbd/bitmask.hpp"
#include "bbbd/errors.hpp"

namespace bbbd {

// Run-length counts over a column-major pixel traversal, alternating
// background/foreground and starting with background (the uncompressed COCO
// convention). Canonical form is whatever encode_rle emits: a possibly-zero
// leading background run followed by strictly positive runs.
struct RleCounts {
    std::vector<std::uint64_t> counts;

    friend bool operator==(const RleCounts&, const RleCounts&) = default;
};

// Expands column-major runs into a raster. Pixel p of the traversal lands at
// column p / height, row p % height.
[[nodiscard]] inline Bitmask decode_rle(const RleCounts& r, int width, int height) {
    const std::uint64_t expected =
        static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
    std::uint64_t total = 0;
    for (std::uint64_t c : r.counts) total += c;
    if (total != expected)
        throw LengthMismatch("decode_rle: counts sum to " + std::to_string(total) +
                             ", raster has " + std::to_string(expected) + " pixels");

    Bitmask out(width, height);
    std::uint64_t pos = 0;
    bool value = false;
    for (std::uint64_t run : r.counts) {
        if (value) {
            for (std::uint64_t k = 0; k < run; ++k) {
                const std::uint64_t p = pos + k;
                out.set(static_cast<int>(p / height), static_cast<int>(p % height));
            }
        }
        pos += run;
        value = !value;
    }
    return out;
}

[[nodiscard]] inline RleCounts encode_rle(const Bitmask& m) {
    RleCounts r;
    bool current = false;
    std::uint64_t run = 0;
    for (int x = 0; x < m.width(); ++x) {
        for (int y = 0; y < m.height(); ++y) {
            if (m.at(x, y) == current) {
                ++run;
            } else {
                r.counts.push_back(run);
                run = 1;
                current = !current;
            }
        }
    }
    r.counts.push_back(run);
    return r;
}

} // namespace bbbd
