#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bbbd/scene_io.hpp"

namespace bbbd {

// Result of converting a COCOA-style amodal annotation file. Per-region
// problems are reported as diagnostics and the region skipped; only a
// structurally unusable file throws.
struct CocoaConversion {
    std::vector<Scene> scenes;
    std::vector<std::string> diagnostics;
    std::size_t images = 0;
    std::size_t objects = 0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

namespace detail {

// Accepts the mask encodings COCOA regions carry: a flat polygon, a list of
// polygons, or an uncompressed RLE object {"size": [h, w], "counts": [...]}.
// Compressed string counts are out of scope and rejected loudly.
inline Bitmask cocoa_mask(const json& field, int width, int height, const std::string& where) {
    if (field.is_object()) {
        if (!field.contains("counts"))
            throw MissingField(where + ": RLE object without counts");
        const json& counts = field["counts"];
        if (counts.is_string())
            throw UnsupportedEncoding(where + ": compressed RLE strings are not supported");
        if (!counts.is_array())
            throw MissingField(where + ": counts is neither an array nor a string");
        if (field.contains("size")) {
            const json& size = field["size"];
            if (!size.is_array() || size.size() != 2 ||
                !size[0].is_number_integer() || !size[1].is_number_integer())
                throw MissingField(where + ": malformed size field");
            if (size[0].get<int>() != height || size[1].get<int>() != width)
                throw MissingField(where + ": mask size does not match the image extent");
        }
        RleCounts rle;
        rle.counts.reserve(counts.size());
        for (const auto& c : counts) {
            if (!c.is_number_integer() || c.get<std::int64_t>() < 0)
                throw MissingField(where + ": counts must be non-negative integers");
            rle.counts.push_back(c.get<std::uint64_t>());
        }
        return decode_rle(rle, width, height);
    }

    if (field.is_array()) {
        // Multi-polygon regions are the union of their parts.
        const bool nested = !field.empty() && field[0].is_array();
        Bitmask out(width, height);
        const auto rasterize_flat = [&](const json& poly) {
            std::vector<double> flat;
            flat.reserve(poly.size());
            for (const auto& v : poly) {
                if (!v.is_number()) throw MissingField(where + ": polygon holds a non-number");
                flat.push_back(v.get<double>());
            }
            out |= rasterize_polygon(std::span<const double>(flat), width, height);
        };
        if (nested)
            for (const auto& poly : field) rasterize_flat(poly);
        else
            rasterize_flat(field);
        return out;
    }

    throw MissingField(where + ": unrecognized mask encoding");
}

struct CocoaRegion {
    std::int64_t id = 0;
    int depth_rank = 0; // smaller = nearer the camera
    Bitmask amodal;
    Bitmask modal;
    std::optional<double> occlude_rate;
    std::optional<std::string> category;
};

} // namespace detail

// Converts COCOA-style amodal annotations into canonical scenes. Image
// extents come from the annotation file's "images" list or the optional
// separate meta document. Regions carry the visible-mask encoding, the
// occlusion rate, and the depth layering ("order", 1 = nearest; list
// position when absent). Ground-truth order pairs are derived from that
// layering: for every region pair whose amodal rasters overlap, the nearer
// layer is recorded as the occluder.
inline CocoaConversion convert_cocoa(const nlohmann::json& annotation_json,
                                     const nlohmann::json* images_meta = nullptr) {
    using detail::json;
    CocoaConversion out;

    std::map<std::int64_t, std::pair<int, int>> dims; // id -> (width, height)
    const auto scan_images = [&](const json& doc) {
        const json* arr = nullptr;
        if (doc.is_array()) arr = &doc;
        else if (doc.is_object() && doc.contains("images") && doc["images"].is_array())
            arr = &doc["images"];
        if (!arr) return;
        for (const auto& img : *arr) {
            if (!img.is_object() || !img.contains("id") || !img.contains("width") ||
                !img.contains("height"))
                continue;
            dims[img["id"].get<std::int64_t>()] = {img["width"].get<int>(),
                                                   img["height"].get<int>()};
        }
    };
    scan_images(annotation_json);
    if (images_meta) scan_images(*images_meta);

    const json* annotations = nullptr;
    if (annotation_json.is_array()) annotations = &annotation_json;
    else if (annotation_json.is_object() && annotation_json.contains("annotations") &&
             annotation_json["annotations"].is_array())
        annotations = &annotation_json["annotations"];
    if (!annotations)
        throw SchemaError("$.annotations: missing annotation list");

    // Group region lists by image id, preserving encounter order.
    std::map<std::int64_t, std::vector<const json*>> regions_by_image;
    std::vector<std::int64_t> image_order;
    for (std::size_t k = 0; k < annotations->size(); ++k) {
        const json& ann = (*annotations)[k];
        if (!ann.is_object() || !ann.contains("image_id") ||
            !ann["image_id"].is_number_integer()) {
            out.diagnostics.push_back("annotation " + std::to_string(k) +
                                      ": missing image_id, skipped");
            continue;
        }
        const std::int64_t image_id = ann["image_id"].get<std::int64_t>();
        if (!ann.contains("regions") || !ann["regions"].is_array()) {
            out.diagnostics.push_back("image " + std::to_string(image_id) +
                                      ": annotation without a region list, skipped");
            continue;
        }
        if (regions_by_image.find(image_id) == regions_by_image.end())
            image_order.push_back(image_id);
        for (const auto& region : ann["regions"])
            regions_by_image[image_id].push_back(&region);
    }

    for (std::int64_t image_id : image_order) {
        const auto dims_it = dims.find(image_id);
        if (dims_it == dims.end()) {
            out.diagnostics.push_back("image " + std::to_string(image_id) +
                                      ": extent unknown (not in the images list), skipped");
            continue;
        }
        const int width = dims_it->second.first;
        const int height = dims_it->second.second;

        std::vector<detail::CocoaRegion> regions;
        std::set<std::int64_t> used_ids;
        const auto& raw_regions = regions_by_image[image_id];
        for (std::size_t ri = 0; ri < raw_regions.size(); ++ri) {
            const json& r = *raw_regions[ri];
            const std::string where =
                "image " + std::to_string(image_id) + " region " + std::to_string(ri);
            try {
                if (!r.is_object()) throw MissingField(where + ": region is not an object");
                detail::CocoaRegion region;
                region.id = (r.contains("id") && r["id"].is_number_integer())
                                ? r["id"].get<std::int64_t>()
                                : static_cast<std::int64_t>(ri) + 1;
                if (!used_ids.insert(region.id).second)
                    throw MissingField(where + ": duplicate region id " +
                                       std::to_string(region.id));
                region.depth_rank = (r.contains("order") && r["order"].is_number_integer())
                                        ? r["order"].get<int>()
                                        : static_cast<int>(ri) + 1;
                if (r.contains("name") && r["name"].is_string())
                    region.category = r["name"].get<std::string>();
                if (!r.contains("segmentation"))
                    throw MissingField(where + ": no segmentation");
                region.amodal = detail::cocoa_mask(r["segmentation"], width, height,
                                                   where + " segmentation");
                if (r.contains("visible_mask") && !r["visible_mask"].is_null())
                    region.modal = detail::cocoa_mask(r["visible_mask"], width, height,
                                                      where + " visible_mask");
                else
                    region.modal = region.amodal; // unoccluded region
                if (r.contains("occlude_rate") && r["occlude_rate"].is_number())
                    region.occlude_rate = r["occlude_rate"].get<double>();
                regions.push_back(std::move(region));
            } catch (const Error& e) {
                out.diagnostics.push_back(std::string(e.what()) + ", region skipped");
            }
        }

        Scene scene;
        scene.image_id = image_id;
        scene.width = width;
        scene.height = height;

        std::vector<std::size_t> order(regions.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return regions[a].id < regions[b].id;
        });

        GroundTruth gt;
        gt.order = OrderMatrix(regions.size());
        gt.occluded.assign(regions.size(), false);
        gt.occlusion_ratio.assign(regions.size(), std::nullopt);
        std::vector<bool> is_occludee(regions.size(), false);

        for (std::size_t i = 0; i < order.size(); ++i) {
            const detail::CocoaRegion& region = regions[order[i]];
            Instance inst;
            inst.id = region.id;
            inst.bbox = tight_bbox(region.modal);
            inst.mask = region.modal;
            inst.category = region.category;
            scene.instances.push_back(std::move(inst));
            gt.occlusion_ratio[i] = region.occlude_rate;
        }

        for (std::size_t a = 0; a < order.size(); ++a) {
            for (std::size_t b = a + 1; b < order.size(); ++b) {
                const detail::CocoaRegion& ra = regions[order[a]];
                const detail::CocoaRegion& rb = regions[order[b]];
                if (ra.depth_rank == rb.depth_rank) continue;
                if (!masks_intersect(ra.amodal, rb.amodal)) continue;
                gt.order.set_pair(a, b, ra.depth_rank < rb.depth_rank ? 1 : -1);
                is_occludee[ra.depth_rank < rb.depth_rank ? b : a] = true;
            }
        }

        for (std::size_t i = 0; i < order.size(); ++i) {
            gt.occluded[i] = gt.occlusion_ratio[i].has_value() ? *gt.occlusion_ratio[i] > 0.0
                                                               : is_occludee[i];
            if (gt.occluded[i]) ++out.positives;
            else ++out.negatives;
        }
        if (std::none_of(gt.occlusion_ratio.begin(), gt.occlusion_ratio.end(),
                         [](const auto& v) { return v.has_value(); }))
            gt.occlusion_ratio.clear();

        out.objects += scene.instances.size();
        scene.gt = std::move(gt);
        out.scenes.push_back(std::move(scene));
        ++out.images;
    }

    return out;
}

} // namespace bbbd
