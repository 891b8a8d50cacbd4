#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bbbd/errors.hpp"
#include "bbbd/polygon.hpp"
#include "bbbd/rle.hpp"
#include "bbbd/scene.hpp"

namespace bbbd {

inline constexpr int scene_schema_version = 1;

namespace detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] inline void schema_fail(const std::string& path, const std::string& what) {
    throw SchemaError(path + ": " + what);
}

inline const json& require_field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) schema_fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_fail(path + "." + key, "missing field");
    return *it;
}

inline std::int64_t require_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) schema_fail(path, "expected an integer");
    return v.get<std::int64_t>();
}

inline double require_number(const json& v, const std::string& path) {
    if (!v.is_number()) schema_fail(path, "expected a number");
    return v.get<double>();
}

// bbox values are integers in canonical files; fractional values are
// accepted as continuous coordinates with exclusive maxima and snapped to
// the inclusive pixel grid.
inline BBox parse_bbox(const json& v, int width, int height, const std::string& path) {
    if (!v.is_array() || v.size() != 4) schema_fail(path, "expected [x_min, y_min, x_max, y_max]");
    bool integral = true;
    double vals[4];
    for (std::size_t k = 0; k < 4; ++k) {
        vals[k] = require_number(v[k], path + "[" + std::to_string(k) + "]");
        if (!v[k].is_number_integer()) integral = false;
    }
    BBox box;
    if (integral) {
        const int x0 = static_cast<int>(vals[0]), y0 = static_cast<int>(vals[1]);
        const int x1 = static_cast<int>(vals[2]), y1 = static_cast<int>(vals[3]);
        if (x0 > x1 || y0 > y1)
            throw ValidationError(path + ": inverted box [" + std::to_string(x0) + "," +
                                  std::to_string(y0) + "," + std::to_string(x1) + "," +
                                  std::to_string(y1) + "]");
        if (x0 < 0 || y0 < 0 || x1 >= width || y1 >= height)
            throw ValidationError(path + ": box exceeds the image extent");
        box = BBox{x0, y0, x1, y1};
    } else {
        box = box_from_fractional(vals[0], vals[1], vals[2], vals[3], width, height);
        if (box.is_empty())
            throw ValidationError(path + ": fractional box collapses to zero area");
    }
    return box;
}

inline Bitmask parse_mask(const json& v, int width, int height, const std::string& path) {
    if (!v.is_object()) schema_fail(path, "expected an object with \"rle\" or \"polygon\"");
    const bool has_rle = v.contains("rle");
    const bool has_poly = v.contains("polygon");
    if (has_rle == has_poly)
        schema_fail(path, "exactly one of \"rle\" or \"polygon\" is required");

    if (has_rle) {
        const json& counts = v["rle"];
        if (!counts.is_array()) schema_fail(path + ".rle", "expected an array of integers");
        RleCounts rle;
        rle.counts.reserve(counts.size());
        for (std::size_t k = 0; k < counts.size(); ++k) {
            const std::int64_t c = require_int(counts[k], path + ".rle[" + std::to_string(k) + "]");
            if (c < 0) schema_fail(path + ".rle[" + std::to_string(k) + "]", "negative run length");
            rle.counts.push_back(static_cast<std::uint64_t>(c));
        }
        try {
            return decode_rle(rle, width, height);
        } catch (const LengthMismatch& e) {
            throw ValidationError(path + ".rle: " + e.what());
        }
    }

    const json& poly = v["polygon"];
    if (!poly.is_array()) schema_fail(path + ".polygon", "expected an array of numbers");
    std::vector<double> flat;
    flat.reserve(poly.size());
    for (std::size_t k = 0; k < poly.size(); ++k)
        flat.push_back(require_number(poly[k], path + ".polygon[" + std::to_string(k) + "]"));
    try {
        return rasterize_polygon(std::span<const double>(flat), width, height);
    } catch (const DegeneratePolygon& e) {
        throw ValidationError(path + ".polygon: " + e.what());
    }
}

} // namespace detail

// Parses a scene from already-decoded JSON, validating the schema and the
// scene invariants. Instances come out sorted by id, and the ground-truth
// order matrix (when present) is materialized over that order.
inline Scene parse_scene(const nlohmann::json& j) {
    using detail::require_field;
    using detail::require_int;
    using detail::schema_fail;

    if (!j.is_object()) schema_fail("$", "expected a scene object");

    const std::int64_t version = require_int(require_field(j, "schema_version", "$"), "$.schema_version");
    if (version != scene_schema_version)
        schema_fail("$.schema_version", "unsupported version " + std::to_string(version));

    const auto& image = require_field(j, "image", "$");
    Scene scene;
    scene.image_id = require_int(require_field(image, "id", "$.image"), "$.image.id");
    scene.width = static_cast<int>(require_int(require_field(image, "width", "$.image"), "$.image.width"));
    scene.height = static_cast<int>(require_int(require_field(image, "height", "$.image"), "$.image.height"));
    if (scene.width <= 0 || scene.height <= 0)
        throw ValidationError("$.image: non-positive extent " + std::to_string(scene.width) +
                              "x" + std::to_string(scene.height));

    const auto& instances = require_field(j, "instances", "$");
    if (!instances.is_array()) schema_fail("$.instances", "expected an array");

    std::set<std::int64_t> seen_ids;
    for (std::size_t k = 0; k < instances.size(); ++k) {
        const std::string path = "$.instances[" + std::to_string(k) + "]";
        const auto& entry = instances[k];
        if (!entry.is_object()) schema_fail(path, "expected an object");

        Instance inst;
        inst.id = require_int(require_field(entry, "id", path), path + ".id");
        if (!seen_ids.insert(inst.id).second)
            throw ValidationError(path + ".id: duplicate instance id " + std::to_string(inst.id));

        if (entry.contains("category")) {
            if (!entry["category"].is_string()) schema_fail(path + ".category", "expected a string");
            inst.category = entry["category"].get<std::string>();
        }

        inst.mask = detail::parse_mask(require_field(entry, "mask", path), scene.width,
                                       scene.height, path + ".mask");

        const BBox support = tight_bbox(inst.mask);
        if (entry.contains("bbox")) {
            inst.bbox = detail::parse_bbox(entry["bbox"], scene.width, scene.height, path + ".bbox");
            if (!contains(inst.bbox, support))
                throw ValidationError(path + ".bbox: box does not contain the mask support");
        } else {
            inst.bbox = support;
        }
        scene.instances.push_back(std::move(inst));
    }

    std::sort(scene.instances.begin(), scene.instances.end(),
              [](const Instance& a, const Instance& b) { return a.id < b.id; });

    if (j.contains("gt")) {
        const auto& gt_json = j["gt"];
        if (!gt_json.is_object()) schema_fail("$.gt", "expected an object");

        std::map<std::int64_t, std::size_t> index_of;
        for (std::size_t i = 0; i < scene.instances.size(); ++i)
            index_of[scene.instances[i].id] = i;

        GroundTruth gt;
        gt.order = OrderMatrix(scene.instances.size());
        gt.occluded.assign(scene.instances.size(), false);
        gt.occlusion_ratio.assign(scene.instances.size(), std::nullopt);

        std::vector<bool> is_occludee(scene.instances.size(), false);
        if (gt_json.contains("order_pairs")) {
            const auto& pairs = gt_json["order_pairs"];
            if (!pairs.is_array()) schema_fail("$.gt.order_pairs", "expected an array");
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                const std::string path = "$.gt.order_pairs[" + std::to_string(k) + "]";
                const auto& pair = pairs[k];
                if (!pair.is_array() || pair.size() != 2)
                    schema_fail(path, "expected [occluder_id, occludee_id]");
                const std::int64_t occluder = require_int(pair[0], path + "[0]");
                const std::int64_t occludee = require_int(pair[1], path + "[1]");
                const auto it_r = index_of.find(occluder);
                const auto it_e = index_of.find(occludee);
                if (it_r == index_of.end() || it_e == index_of.end())
                    throw ValidationError(path + ": references an unknown instance id");
                if (occluder == occludee)
                    throw ValidationError(path + ": instance cannot occlude itself");
                if (gt.order.at(it_r->second, it_e->second) != 0)
                    throw ValidationError(path + ": pair already ordered");
                gt.order.set_pair(it_r->second, it_e->second, 1);
                is_occludee[it_e->second] = true;
            }
        }

        if (gt_json.contains("occlusion_ratio")) {
            const auto& ratios = gt_json["occlusion_ratio"];
            if (!ratios.is_object()) schema_fail("$.gt.occlusion_ratio", "expected an object");
            for (auto it = ratios.begin(); it != ratios.end(); ++it) {
                const std::string path = "$.gt.occlusion_ratio[\"" + it.key() + "\"]";
                std::int64_t id = 0;
                try {
                    id = std::stoll(it.key());
                } catch (...) {
                    schema_fail(path, "key is not an instance id");
                }
                const auto idx = index_of.find(id);
                if (idx == index_of.end())
                    throw ValidationError(path + ": references an unknown instance id");
                const double ratio = detail::require_number(*it, path);
                if (ratio < 0.0 || ratio > 1.0)
                    throw ValidationError(path + ": ratio outside [0, 1]");
                gt.occlusion_ratio[idx->second] = ratio;
            }
        }

        // Labels: ratio > 0 where a ratio is annotated, otherwise membership
        // as an occludee in the order pairs.
        for (std::size_t i = 0; i < scene.instances.size(); ++i) {
            if (gt.occlusion_ratio[i].has_value())
                gt.occluded[i] = *gt.occlusion_ratio[i] > 0.0;
            else
                gt.occluded[i] = is_occludee[i];
        }
        if (std::none_of(gt.occlusion_ratio.begin(), gt.occlusion_ratio.end(),
                         [](const auto& r) { return r.has_value(); }))
            gt.occlusion_ratio.clear();

        scene.gt = std::move(gt);
    }

    return scene;
}

inline Scene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    try {
        return parse_scene(j);
    } catch (SchemaError& e) {
        throw SchemaError(path.string() + ": " + e.what());
    } catch (ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

// Canonical serialization: fixed key order, instances sorted by id, masks as
// canonical RLE, ground-truth pairs in row-major matrix order. Identical
// scenes serialize to identical bytes on every run and platform.
inline std::string save_scene(const Scene& scene) {
    using detail::ordered_json;

    std::vector<std::size_t> order(scene.instances.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scene.instances[a].id < scene.instances[b].id;
    });

    ordered_json root;
    root["schema_version"] = scene_schema_version;
    root["image"] = {{"id", scene.image_id}, {"width", scene.width}, {"height", scene.height}};

    ordered_json instances = ordered_json::array();
    for (std::size_t idx : order) {
        const Instance& inst = scene.instances[idx];
        ordered_json entry;
        entry["id"] = inst.id;
        if (inst.category) entry["category"] = *inst.category;
        if (!inst.bbox.is_empty())
            entry["bbox"] = {inst.bbox.x_min, inst.bbox.y_min, inst.bbox.x_max, inst.bbox.y_max};
        entry["mask"] = {{"rle", encode_rle(inst.mask).counts}};
        instances.push_back(std::move(entry));
    }
    root["instances"] = std::move(instances);

    if (scene.gt) {
        const GroundTruth& gt = *scene.gt;
        ordered_json pairs = ordered_json::array();
        for (std::size_t a = 0; a < order.size(); ++a) {
            for (std::size_t b = a + 1; b < order.size(); ++b) {
                const int cell = gt.order.at(order[a], order[b]);
                if (cell == 1)
                    pairs.push_back({scene.instances[order[a]].id, scene.instances[order[b]].id});
                else if (cell == -1)
                    pairs.push_back({scene.instances[order[b]].id, scene.instances[order[a]].id});
            }
        }
        ordered_json gt_json;
        gt_json["order_pairs"] = std::move(pairs);
        if (!gt.occlusion_ratio.empty()) {
            ordered_json ratios = ordered_json::object();
            for (std::size_t idx : order)
                if (gt.occlusion_ratio[idx].has_value())
                    ratios[std::to_string(scene.instances[idx].id)] = *gt.occlusion_ratio[idx];
            gt_json["occlusion_ratio"] = std::move(ratios);
        }
        root["gt"] = std::move(gt_json);
    }

    return root.dump(2) + "\n";
}

inline void save_scene_file(const Scene& scene, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << save_scene(scene);
}

} // namespace bbbd
