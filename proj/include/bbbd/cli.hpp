#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bbbd/baselines.hpp"
#include "bbbd/cocoa.hpp"
#include "bbbd/detector.hpp"
#include "bbbd/parallel.hpp"
#include "bbbd/reporting.hpp"
#include "bbbd/scene_io.hpp"
#include "bbbd/synth.hpp"

namespace bbbd::cli {

namespace fs = std::filesystem;

enum class Method { bbbd, yaxis, area };

// BBBD_LOG=info|debug (or 1|2) raises diagnostic verbosity on stderr.
inline int log_level() {
    const char* env = std::getenv("BBBD_LOG");
    if (!env) return 0;
    const std::string v = env;
    if (v == "debug" || v == "2") return 2;
    if (v == "info" || v == "1") return 1;
    return 0;
}

inline void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[bbbd] " << msg << "\n";
}

inline void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << bytes;
    if (!out) throw Error("failed while writing " + path.string());
}

struct RunConfig {
    Method method = Method::bbbd;
    BbbdConfig bbbd;
    BaselineConfig baseline;
    std::vector<std::string> inputs;
    std::string out_dir;
    std::string format;
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    bool strict_order_accuracy = false;
};

namespace detail {

[[nodiscard]] inline std::vector<fs::path> sorted_inputs(const std::vector<std::string>& raw) {
    std::vector<fs::path> paths(raw.begin(), raw.end());
    std::sort(paths.begin(), paths.end(),
              [](const fs::path& a, const fs::path& b) { return a.string() < b.string(); });
    return paths;
}

// Output stem per input; duplicated stems get a positional suffix so two
// inputs from different directories cannot clobber each other.
[[nodiscard]] inline std::vector<std::string> output_stems(const std::vector<fs::path>& inputs) {
    std::map<std::string, int> uses;
    for (const fs::path& p : inputs) ++uses[p.stem().string()];
    std::vector<std::string> stems;
    stems.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        std::string stem = inputs[i].stem().string();
        if (uses[stem] > 1) stem += "_" + std::to_string(i);
        stems.push_back(std::move(stem));
    }
    return stems;
}

[[nodiscard]] inline OrderMatrix compute_matrix(const Scene& scene, const RunConfig& cfg,
                                                Method method, unsigned pair_jobs) {
    switch (method) {
        case Method::yaxis: return yaxis_matrix(scene.instances, cfg.baseline, pair_jobs);
        case Method::area: return area_matrix(scene.instances, cfg.baseline, pair_jobs);
        case Method::bbbd: break;
    }
    return build_order_matrix(scene.instances, cfg.bbbd, pair_jobs);
}

[[nodiscard]] inline std::vector<std::int64_t> instance_ids(const Scene& scene) {
    std::vector<std::int64_t> ids;
    ids.reserve(scene.instances.size());
    for (const Instance& inst : scene.instances) ids.push_back(inst.id);
    return ids;
}

struct SceneOutputs {
    std::vector<std::pair<fs::path, std::string>> files;
    std::string error;
};

// Loads and processes every input on up to cfg.jobs workers, then writes the
// results in input order, so the parallelism degree never changes any output
// byte. Returns the number of failed inputs.
template <typename Process>
[[nodiscard]] inline int for_each_scene(const RunConfig& cfg, Process&& process) {
    const auto inputs = sorted_inputs(cfg.inputs);
    const auto stems = output_stems(inputs);
    const unsigned pair_jobs = inputs.size() == 1 ? cfg.jobs : 1;

    std::vector<SceneOutputs> results(inputs.size());
    parallel_for(inputs.size(), cfg.jobs, [&](std::size_t i) {
        try {
            const Scene scene = load_scene(inputs[i]);
            process(scene, stems[i], results[i], pair_jobs);
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    });

    int failures = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (!results[i].error.empty()) {
            const std::string& err = results[i].error;
            if (err.rfind(inputs[i].string(), 0) == 0)
                std::cerr << "bbbd: " << err << "\n";
            else
                std::cerr << "bbbd: " << inputs[i].string() << ": " << err << "\n";
            ++failures;
            continue;
        }
        try {
            for (const auto& [path, bytes] : results[i].files) {
                write_file(path, bytes);
                log_info("wrote " + path.string());
            }
        } catch (const std::exception& e) {
            std::cerr << "bbbd: " << e.what() << "\n";
            ++failures;
        }
    }
    return failures;
}

} // namespace detail

inline int cmd_order(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const int failures = detail::for_each_scene(
        cfg, [&](const Scene& scene, const std::string& stem, detail::SceneOutputs& out,
                 unsigned pair_jobs) {
            const OrderMatrix m = detail::compute_matrix(scene, cfg, cfg.method, pair_jobs);
            const auto ids = detail::instance_ids(scene);
            out.files.emplace_back(fs::path(cfg.out_dir) / (stem + ".order.json"),
                                   matrix_json(m, ids).dump(2) + "\n");
            if (cfg.format == "dot")
                out.files.emplace_back(fs::path(cfg.out_dir) / (stem + ".order.dot"),
                                       to_dot(m, ids));
        });
    return failures ? 1 : 0;
}

inline int cmd_detect(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const int failures = detail::for_each_scene(
        cfg, [&](const Scene& scene, const std::string& stem, detail::SceneOutputs& out,
                 unsigned pair_jobs) {
            const OrderMatrix m = detail::compute_matrix(scene, cfg, cfg.method, pair_jobs);
            out.files.emplace_back(
                fs::path(cfg.out_dir) / (stem + ".labels.json"),
                labels_json(detail::instance_ids(scene), detect_occluded(m)).dump(2) + "\n");
        });
    return failures ? 1 : 0;
}

namespace detail {

[[nodiscard]] inline EvalReport evaluate_method(const Scene& scene, const RunConfig& cfg,
                                                Method method, unsigned pair_jobs) {
    const OrderMatrix pred = compute_matrix(scene, cfg, method, pair_jobs);
    EvalReport report = detection_report(detect_occluded(pred), *scene.gt);
    const OrderAccuracy rel = order_accuracy(pred, scene.gt->order, false);
    const OrderAccuracy strict = order_accuracy(pred, scene.gt->order, true);
    report.related_pairs = rel.related;
    report.matched_pairs = rel.matched;
    report.strict_related_pairs = strict.related;
    report.strict_matched_pairs = strict.matched;
    return report;
}

} // namespace detail

inline int cmd_eval(const RunConfig& cfg) {
    static constexpr Method methods[] = {Method::bbbd, Method::yaxis, Method::area};
    static constexpr const char* method_names[] = {"bbbd", "yaxis", "area"};

    const auto inputs = detail::sorted_inputs(cfg.inputs);
    const unsigned pair_jobs = inputs.size() == 1 ? cfg.jobs : 1;

    struct PerScene {
        std::int64_t image_id = 0;
        EvalReport reports[3];
        std::string error;
    };
    std::vector<PerScene> rows(inputs.size());

    parallel_for(inputs.size(), cfg.jobs, [&](std::size_t i) {
        try {
            const Scene scene = load_scene(inputs[i]);
            if (!scene.gt)
                throw MissingGroundTruth(inputs[i].string() + ": scene has no gt block");
            rows[i].image_id = scene.image_id;
            for (int m = 0; m < 3; ++m)
                rows[i].reports[m] = detail::evaluate_method(scene, cfg, methods[m], pair_jobs);
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    });

    int failures = 0;
    std::vector<EvalReport> per_method[3];
    nlohmann::ordered_json per_scene_json = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].error.empty()) {
            std::cerr << "bbbd: " << rows[i].error << "\n";
            ++failures;
            continue;
        }
        nlohmann::ordered_json entry;
        entry["input"] = inputs[i].string();
        entry["image_id"] = rows[i].image_id;
        for (int m = 0; m < 3; ++m) {
            per_method[m].push_back(rows[i].reports[m]);
            entry[method_names[m]] = report_json(rows[i].reports[m]);
        }
        per_scene_json.push_back(std::move(entry));
    }

    std::vector<MethodReport> aggregate_rows;
    for (int m = 0; m < 3; ++m)
        aggregate_rows.emplace_back(method_names[m], aggregate(per_method[m]));

    std::string body;
    std::string filename;
    if (cfg.format == "json") {
        nlohmann::ordered_json root;
        root["per_scene"] = std::move(per_scene_json);
        nlohmann::ordered_json agg;
        for (const auto& [name, report] : aggregate_rows) agg[name] = report_json(report);
        root["aggregate"] = std::move(agg);
        body = root.dump(2) + "\n";
        filename = "report.json";
    } else if (cfg.format == "csv") {
        body = report_csv(aggregate_rows, cfg.strict_order_accuracy);
        filename = "report.csv";
    } else {
        body = report_table(aggregate_rows, cfg.strict_order_accuracy);
        filename = "report.txt";
    }

    if (cfg.out_dir.empty()) {
        std::cout << body;
    } else {
        fs::create_directories(cfg.out_dir);
        try {
            write_file(fs::path(cfg.out_dir) / filename, body);
        } catch (const std::exception& e) {
            std::cerr << "bbbd: " << e.what() << "\n";
            ++failures;
        }
    }
    return failures ? 1 : 0;
}

struct SynthConfig {
    std::size_t count = 0;
    std::uint64_t seed = 0;
    GenConstraints constraints;
    std::string out_dir;
    bool self_check = false;
};

namespace detail {

// Internal consistency of one generated scene: visible masks pairwise
// disjoint, coverage preserved, ground truth well-formed.
[[nodiscard]] inline std::vector<std::string> synth_self_check(const SceneSpec& spec,
                                                               const Scene& scene) {
    std::vector<std::string> problems;
    const RenderedScene rendered = render_modal(spec);

    Bitmask modal_union(spec.width, spec.height);
    Bitmask amodal_union(spec.width, spec.height);
    for (std::size_t i = 0; i < rendered.scene.instances.size(); ++i) {
        const Bitmask& modal = rendered.scene.instances[i].mask;
        if (masks_intersect(modal_union, modal))
            problems.push_back("visible masks overlap at instance " + std::to_string(i));
        modal_union |= modal;
        amodal_union |= rendered.amodal[i];
    }
    if (!(modal_union == amodal_union))
        problems.push_back("visible-mask union does not match shape coverage");

    if (!scene.gt) {
        problems.push_back("generated scene has no ground truth");
        return problems;
    }
    if (!scene.gt->order.antisymmetric() || !scene.gt->order.zero_diagonal())
        problems.push_back("ground-truth order matrix violates its invariants");
    for (std::size_t i = 0; i < scene.instances.size(); ++i)
        if (!(scene.instances[i].bbox == tight_bbox(scene.instances[i].mask)))
            problems.push_back("bbox of instance " + std::to_string(i) + " is not tight");
    return problems;
}

} // namespace detail

inline int cmd_synth(const SynthConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    std::vector<SceneSpec> specs;
    try {
        specs = generate_random(cfg.seed, cfg.count, cfg.constraints);
    } catch (const InfeasibleConstraints& e) {
        std::cerr << "bbbd: " << e.what() << "\n";
        return 1;
    }

    int failures = 0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const Scene scene = synth_scene(specs[i], static_cast<std::int64_t>(i));
        if (cfg.self_check) {
            for (const std::string& problem : detail::synth_self_check(specs[i], scene)) {
                std::cerr << "bbbd: scene " << i << ": " << problem << "\n";
                ++failures;
            }
        }
        char name[32];
        std::snprintf(name, sizeof(name), "scene_%06zu.json", i);
        try {
            write_file(fs::path(cfg.out_dir) / name, save_scene(scene));
        } catch (const std::exception& e) {
            std::cerr << "bbbd: " << e.what() << "\n";
            ++failures;
        }
    }
    std::cout << specs.size() << " scenes written to " << cfg.out_dir << "\n";
    return failures ? 1 : 0;
}

struct ConvertConfig {
    std::vector<std::string> inputs;
    std::string images_meta;
    std::string out_dir;
};

inline int cmd_convert(const ConvertConfig& cfg) {
    fs::create_directories(cfg.out_dir);

    nlohmann::json meta;
    bool have_meta = false;
    if (!cfg.images_meta.empty()) {
        std::ifstream in(cfg.images_meta, std::ios::binary);
        if (!in) {
            std::cerr << "bbbd: cannot open " << cfg.images_meta << "\n";
            return 1;
        }
        try {
            in >> meta;
            have_meta = true;
        } catch (const nlohmann::json::parse_error& e) {
            std::cerr << "bbbd: " << cfg.images_meta << ": " << e.what() << "\n";
            return 1;
        }
    }

    CocoaConversion totals;
    std::size_t failed_inputs = 0;
    const auto inputs = detail::sorted_inputs(cfg.inputs);
    for (const fs::path& input : inputs) {
        nlohmann::json doc;
        std::ifstream in(input, std::ios::binary);
        if (!in) {
            std::cerr << "bbbd: cannot open " << input.string() << "\n";
            ++failed_inputs;
            continue;
        }
        try {
            in >> doc;
        } catch (const nlohmann::json::parse_error& e) {
            std::cerr << "bbbd: " << input.string() << ": " << e.what() << "\n";
            ++failed_inputs;
            continue;
        }

        try {
            CocoaConversion result = convert_cocoa(doc, have_meta ? &meta : nullptr);
            for (const std::string& diag : result.diagnostics)
                std::cerr << "bbbd: " << input.string() << ": " << diag << "\n";
            for (const Scene& scene : result.scenes) {
                char name[40];
                std::snprintf(name, sizeof(name), "cocoa_%012lld.json",
                              static_cast<long long>(scene.image_id));
                write_file(fs::path(cfg.out_dir) / name, save_scene(scene));
            }
            totals.images += result.images;
            totals.objects += result.objects;
            totals.positives += result.positives;
            totals.negatives += result.negatives;
        } catch (const std::exception& e) {
            std::cerr << "bbbd: " << input.string() << ": " << e.what() << "\n";
            ++failed_inputs;
        }
    }

    std::cout << totals.images << " images, " << totals.objects << " objects, "
              << totals.positives << " positive, " << totals.negatives << " negative\n";
    return (!inputs.empty() && failed_inputs == inputs.size()) ? 1 : 0;
}

inline int run(int argc, const char* const* argv) {
    CLI::App app{"BBBD: occlusion detection and order recovery from modal masks and boxes"};
    app.require_subcommand(1);

    RunConfig cfg;
    SynthConfig synth_cfg;
    ConvertConfig convert_cfg;

    const std::map<std::string, Method> method_names{
        {"bbbd", Method::bbbd}, {"yaxis", Method::yaxis}, {"area", Method::area}};
    const std::map<std::string, CollisionRule> collision_names{
        {"adjacent8", CollisionRule::adjacent8},
        {"overlap", CollisionRule::overlap_only},
        {"none", CollisionRule::none}};
    const std::map<std::string, CountTieBreak> tie_names{
        {"none", CountTieBreak::leave_unordered},
        {"mask-area", CountTieBreak::larger_total_mask_wins}};

    const auto add_common = [&](CLI::App* sub, bool with_method) {
        sub->add_option("inputs", cfg.inputs, "scene JSON files")->required();
        if (with_method)
            sub->add_option("--method", cfg.method, "ordering method")
                ->transform(CLI::CheckedTransformer(method_names));
        sub->add_option("--collision", cfg.bbbd.collision_rule, "mask collision rule")
            ->transform(CLI::CheckedTransformer(collision_names));
        sub->add_option("--tie-break", cfg.bbbd.count_tie_break, "equal in-IA count tie break")
            ->transform(CLI::CheckedTransformer(tie_names));
        sub->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
    };

    CLI::App* order = app.add_subcommand("order", "compute pairwise occlusion order matrices");
    add_common(order, true);
    order->add_option("--out", cfg.out_dir, "output directory")->required();
    order->add_option("--format", cfg.format, "json | dot")
        ->check(CLI::IsMember({"json", "dot"}))
        ->default_val("json");

    CLI::App* detect = app.add_subcommand("detect", "label instances as occluded or not");
    add_common(detect, true);
    detect->add_option("--out", cfg.out_dir, "output directory")->required();

    CLI::App* eval = app.add_subcommand("eval", "score BBBD and both baselines against ground truth");
    add_common(eval, false);
    eval->add_option("--out", cfg.out_dir, "output directory (stdout when omitted)");
    eval->add_option("--format", cfg.format, "table | json | csv")
        ->check(CLI::IsMember({"table", "json", "csv"}))
        ->default_val("table");
    eval->add_flag("--strict-order-accuracy", cfg.strict_order_accuracy,
                   "score ground-truth-unrelated pairs as well");

    CLI::App* synth = app.add_subcommand("synth", "generate synthetic scenes with ground truth");
    synth->add_option("--count", synth_cfg.count, "number of scenes")->required();
    synth->add_option("--seed", synth_cfg.seed, "generator seed");
    synth->add_option("--out", synth_cfg.out_dir, "output directory")->required();
    synth->add_option("--width", synth_cfg.constraints.width, "image width");
    synth->add_option("--height", synth_cfg.constraints.height, "image height");
    synth->add_option("--min-shapes", synth_cfg.constraints.min_shapes, "shapes per scene, lower bound");
    synth->add_option("--max-shapes", synth_cfg.constraints.max_shapes, "shapes per scene, upper bound");
    synth->add_option("--overlap-min", synth_cfg.constraints.overlap_min, "pairwise overlap ratio, lower bound");
    synth->add_option("--overlap-max", synth_cfg.constraints.overlap_max, "pairwise overlap ratio, upper bound");
    synth->add_option("--size-min", synth_cfg.constraints.size_min, "shape half-extent, lower bound");
    synth->add_option("--size-max", synth_cfg.constraints.size_max, "shape half-extent, upper bound");
    synth->add_flag("--self-check", synth_cfg.self_check, "verify generated scenes against the oracle");

    CLI::App* convert = app.add_subcommand("convert", "convert COCOA-style amodal annotations");
    convert->add_option("inputs", convert_cfg.inputs, "annotation JSON files")->required();
    convert->add_option("--images", convert_cfg.images_meta, "separate images metadata JSON");
    convert->add_option("--out", convert_cfg.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (order->parsed()) return cmd_order(cfg);
        if (detect->parsed()) return cmd_detect(cfg);
        if (eval->parsed()) return cmd_eval(cfg);
        if (synth->parsed()) return cmd_synth(synth_cfg);
        if (convert->parsed()) return cmd_convert(convert_cfg);
    } catch (const std::exception& e) {
        std::cerr << "bbbd: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

inline int run(const std::vector<std::string>& args) {
    std::vector<std::string> full;
    full.reserve(args.size() + 1);
    full.emplace_back("bbbd");
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(full.size());
    for (const std::string& s : full) argv.push_back(s.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace bbbd::cli
