#pragma once

#include <cstdio>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bbbd/evaluation.hpp"
#include "bbbd/order_matrix.hpp"

namespace bbbd {

namespace detail {

inline std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

inline std::string pct(std::optional<double> v) {
    return v ? fixed(*v * 100.0, 2) + "%" : "n/a";
}

} // namespace detail

// {"ids": [...], "cells": [[...]]} with cells in the declared id order.
[[nodiscard]] inline nlohmann::ordered_json matrix_json(const OrderMatrix& m,
                                                        std::span<const std::int64_t> ids) {
    nlohmann::ordered_json root;
    root["ids"] = std::vector<std::int64_t>(ids.begin(), ids.end());
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m.at(i, j));
        cells.push_back(std::move(row));
    }
    root["cells"] = std::move(cells);
    return root;
}

[[nodiscard]] inline nlohmann::ordered_json labels_json(std::span<const std::int64_t> ids,
                                                        const std::vector<bool>& occluded) {
    nlohmann::ordered_json root;
    root["ids"] = std::vector<std::int64_t>(ids.begin(), ids.end());
    root["occluded"] = occluded;
    return root;
}

// Directed occlusion graph in DOT form. Every instance is a node; each
// related pair contributes one edge running occludee -> occluder.
[[nodiscard]] inline std::string to_dot(const OrderMatrix& m,
                                        std::span<const std::int64_t> ids) {
    std::string dot = "digraph occlusion_order {\n";
    for (std::int64_t id : ids)
        dot += "  \"" + std::to_string(id) + "\";\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            const int cell = m.at(i, j);
            if (cell == 1)
                dot += "  \"" + std::to_string(ids[j]) + "\" -> \"" + std::to_string(ids[i]) + "\";\n";
            else if (cell == -1)
                dot += "  \"" + std::to_string(ids[i]) + "\" -> \"" + std::to_string(ids[j]) + "\";\n";
        }
    }
    dot += "}\n";
    return dot;
}

[[nodiscard]] inline nlohmann::ordered_json report_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["total_objects"] = r.total_objects();
    j["tp"] = r.tp;
    j["fp"] = r.fp;
    j["tn"] = r.tn;
    j["fn"] = r.fn;
    const double total = r.total_objects() ? static_cast<double>(r.total_objects()) : 1.0;
    j["tp_pct"] = 100.0 * static_cast<double>(r.tp) / total;
    j["fp_pct"] = 100.0 * static_cast<double>(r.fp) / total;
    j["tn_pct"] = 100.0 * static_cast<double>(r.tn) / total;
    j["fn_pct"] = 100.0 * static_cast<double>(r.fn) / total;
    j["accuracy"] = r.accuracy();
    const auto put_optional = [&j](const char* key, std::optional<double> v) {
        if (v) j[key] = *v;
        else j[key] = nullptr;
    };
    put_optional("precision", r.precision());
    put_optional("recall", r.recall());
    j["related_pairs"] = r.related_pairs;
    j["matched_pairs"] = r.matched_pairs;
    put_optional("order_accuracy", r.order_accuracy_value());
    j["strict_related_pairs"] = r.strict_related_pairs;
    j["strict_matched_pairs"] = r.strict_matched_pairs;
    put_optional("strict_order_accuracy", r.strict_order_accuracy_value());
    return j;
}

using MethodReport = std::pair<std::string, EvalReport>;

// One row per method. Fractions carry four decimals, percentages two; blank
// cells mark undefined ratios.
[[nodiscard]] inline std::string report_csv(std::span<const MethodReport> rows,
                                            bool strict_headline = false) {
    std::string csv =
        "method,total_objects,tp,fp,tn,fn,tp_pct,fp_pct,tn_pct,fn_pct,"
        "accuracy,precision,recall,order_accuracy,related_pairs,matched_pairs\n";
    for (const auto& [name, r] : rows) {
        const double total = r.total_objects() ? static_cast<double>(r.total_objects()) : 1.0;
        const auto frac = [](std::optional<double> v) {
            return v ? detail::fixed(*v, 4) : std::string();
        };
        csv += name;
        csv += "," + std::to_string(r.total_objects());
        csv += "," + std::to_string(r.tp) + "," + std::to_string(r.fp);
        csv += "," + std::to_string(r.tn) + "," + std::to_string(r.fn);
        csv += "," + detail::fixed(100.0 * static_cast<double>(r.tp) / total, 2);
        csv += "," + detail::fixed(100.0 * static_cast<double>(r.fp) / total, 2);
        csv += "," + detail::fixed(100.0 * static_cast<double>(r.tn) / total, 2);
        csv += "," + detail::fixed(100.0 * static_cast<double>(r.fn) / total, 2);
        csv += "," + detail::fixed(r.accuracy(), 4);
        csv += "," + frac(r.precision());
        csv += "," + frac(r.recall());
        if (strict_headline) {
            csv += "," + frac(r.strict_order_accuracy_value());
            csv += "," + std::to_string(r.strict_related_pairs);
            csv += "," + std::to_string(r.strict_matched_pairs);
        } else {
            csv += "," + frac(r.order_accuracy_value());
            csv += "," + std::to_string(r.related_pairs);
            csv += "," + std::to_string(r.matched_pairs);
        }
        csv += "\n";
    }
    return csv;
}

// Human-readable comparison table; the column names are the contract, the
// layout is not.
[[nodiscard]] inline std::string report_table(std::span<const MethodReport> rows,
                                              bool strict_headline = false) {
    const int name_width = 18;
    const int col_width = 12;
    std::string table(name_width, ' ');
    for (const auto& [name, r] : rows) {
        table += std::string(col_width - std::min<std::size_t>(name.size(), col_width), ' ');
        table += name.substr(0, col_width);
    }
    table += "\n";

    const auto line = [&](const std::string& label, auto&& cell) {
        table += label + std::string(name_width - std::min<std::size_t>(label.size(), name_width), ' ');
        for (const auto& row : rows) {
            const std::string v = cell(row.second);
            table += std::string(col_width - std::min<std::size_t>(v.size(), col_width), ' ');
            table += v.substr(0, col_width);
        }
        table += "\n";
    };

    line("accuracy", [](const EvalReport& r) { return detail::pct(r.accuracy()); });
    line("precision", [](const EvalReport& r) { return detail::pct(r.precision()); });
    line("recall", [](const EvalReport& r) { return detail::pct(r.recall()); });
    const auto count_pct = [](std::size_t c, std::size_t total) {
        return total ? detail::pct(static_cast<double>(c) / static_cast<double>(total))
                     : std::string("n/a");
    };
    line("tp", [&](const EvalReport& r) { return count_pct(r.tp, r.total_objects()); });
    line("fp", [&](const EvalReport& r) { return count_pct(r.fp, r.total_objects()); });
    line("tn", [&](const EvalReport& r) { return count_pct(r.tn, r.total_objects()); });
    line("fn", [&](const EvalReport& r) { return count_pct(r.fn, r.total_objects()); });
    if (strict_headline)
        line("order accuracy", [](const EvalReport& r) { return detail::pct(r.strict_order_accuracy_value()); });
    else
        line("order accuracy", [](const EvalReport& r) { return detail::pct(r.order_accuracy_value()); });
    line("related pairs", [&](const EvalReport& r) {
        return std::to_string(strict_headline ? r.strict_related_pairs : r.related_pairs);
    });
    line("objects", [](const EvalReport& r) { return std::to_string(r.total_objects()); });
    return table;
}

} // namespace bbbd
