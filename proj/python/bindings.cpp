// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0
//
// Python bindings over the core pipeline. Grids cross the boundary as float64
// arrays, token matrices as float32, and selections as plain dicts.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <string>
#include <vector>

#include "gc2/budget.hpp"
#include "gc2/config.hpp"
#include "gc2/diagnostics.hpp"
#include "gc2/errors.hpp"
#include "gc2/flops.hpp"
#include "gc2/layout.hpp"
#include "gc2/scoring.hpp"
#include "gc2/selector.hpp"
#include "gc2/tensor.hpp"
#include "gc2/video.hpp"

namespace py = pybind11;

namespace {

gc2::ScoreGrid grid_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2)
        throw gc2::ShapeError("score grid must be a 2-d array");
    gc2::ScoreGrid g{static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)), {}};
    g.values.assign(arr.data(), arr.data() + arr.size());
    return g;
}

py::array_t<double> grid_to_array(const gc2::ScoreGrid& g) {
    py::array_t<double> out({g.h, g.w});
    std::memcpy(out.mutable_data(), g.values.data(), g.values.size() * sizeof(double));
    return out;
}

gc2::TokenMatrix matrix_from_array(const py::array_t<float, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2)
        throw gc2::ShapeError("token matrix must be a 2-d array");
    gc2::TokenMatrix m{static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)), {}};
    m.data.assign(arr.data(), arr.data() + arr.size());
    return m;
}

gc2::CompressionConfig build_config(double retention_ratio, double tau, double alpha,
                                    double epsilon, const std::string& scorer,
                                    const std::string& strategy, const std::string& rounding,
                                    std::uint64_t seed) {
    gc2::CompressionConfig cfg;
    cfg.retention_ratio = retention_ratio;
    cfg.tau = tau;
    cfg.alpha = alpha;
    cfg.epsilon = epsilon;
    cfg.scorer = gc2::parse_scorer(scorer);
    cfg.strategy = gc2::parse_strategy(strategy);
    cfg.rounding = gc2::parse_rounding(rounding);
    cfg.seed = seed;
    cfg.validate();
    return cfg;
}

py::dict view_to_dict(const gc2::ViewSelection& v) {
    py::dict d;
    d["ratio"] = v.ratio;
    d["retained"] = v.retained;
    return d;
}

py::dict selection_to_dict(const gc2::SelectionResult& r) {
    py::dict d;
    d["thumbnail"] = view_to_dict(r.thumbnail);
    py::list crops;
    for (const auto& c : r.crops)
        crops.append(view_to_dict(c));
    d["crops"] = crops;
    d["total_retained"] = r.total_retained();
    return d;
}

py::dict layout_to_dict(const gc2::CropLayout& l) {
    py::dict d;
    d["rows"] = l.rows;
    d["cols"] = l.cols;
    d["patch_rows"] = l.patch_rows;
    d["patch_cols"] = l.patch_cols;
    return d;
}

gc2::CropLayout layout_from_args(std::uint32_t rows, std::uint32_t cols, std::uint32_t patch_rows,
                                 std::uint32_t patch_cols) {
    return gc2::CropLayout{rows, cols, patch_rows, patch_cols};
}

// Shared keyword tail for every entry point that takes a config.
#define GC2_CONFIG_ARGS                                                                       \
    py::arg("retention_ratio"), py::kw_only(), py::arg("tau") = 10.0, py::arg("alpha") = 0.5, \
        py::arg("epsilon") = 1e-8, py::arg("scorer") = "cls_attention",                       \
        py::arg("strategy") = "softmax_sum", py::arg("rounding") = "largest_remainder",       \
        py::arg("seed") = std::uint64_t{0}

} // namespace

PYBIND11_MODULE(_globalcom2, m) {
    m.doc() = "Token compression for dynamic-cropping vision-language pipelines";

    py::register_exception<gc2::Error>(m, "Error");

    // ---- tensor container ----
    m.def(
        "read_tensor",
        [](const std::filesystem::path& path) {
            const gc2::Tensor t = gc2::read_tensor(path);
            std::vector<py::ssize_t> shape(t.dims.begin(), t.dims.end());
            py::array_t<float> out(shape);
            std::memcpy(out.mutable_data(), t.data.data(), t.data.size() * sizeof(float));
            return out;
        },
        py::arg("path"), "Read a .gct tensor file as a float32 array.");
    m.def(
        "write_tensor",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& arr,
           const std::filesystem::path& path) {
            gc2::Tensor t;
            for (py::ssize_t i = 0; i < arr.ndim(); ++i)
                t.dims.push_back(static_cast<std::uint32_t>(arr.shape(i)));
            t.data.assign(arr.data(), arr.data() + arr.size());
            gc2::write_tensor(t, path);
        },
        py::arg("array"), py::arg("path"), "Write a float32 array as a .gct tensor file.");

    // ---- crop layout ----
    m.def(
        "select_grid",
        [](std::uint32_t width, std::uint32_t height, std::uint32_t base) {
            return layout_to_dict(gc2::select_grid(width, height, base));
        },
        py::arg("width"), py::arg("height"), py::arg("base") = 336,
        "Pick the crop grid for an image size; returns rows/cols/patch dims.");

    // ---- scoring ----
    m.def(
        "cls_attention_scores",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& query,
           const py::array_t<float, py::array::c_style | py::array::forcecast>& keys,
           std::size_t h, std::size_t w) {
            if (query.ndim() != 1)
                throw gc2::ShapeError("query must be a 1-d array");
            std::vector<float> q(query.data(), query.data() + query.size());
            return grid_to_array(gc2::cls_attention_scores(q, matrix_from_array(keys), h, w));
        },
        py::arg("query"), py::arg("keys"), py::arg("h"), py::arg("w"));
    m.def(
        "neg_patch_attention_scores",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& attention,
           std::size_t h, std::size_t w) {
            return grid_to_array(gc2::neg_patch_attention_scores(matrix_from_array(attention), h, w));
        },
        py::arg("attention"), py::arg("h"), py::arg("w"));
    m.def(
        "neg_global_mean_similarity_scores",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& tokens,
           std::size_t h, std::size_t w) {
            return grid_to_array(
                gc2::neg_global_mean_similarity_scores(matrix_from_array(tokens), h, w));
        },
        py::arg("tokens"), py::arg("h"), py::arg("w"));

    // ---- budgeting ----
    m.def(
        "importance_weights",
        [](const std::vector<double>& richness, double tau, double epsilon) {
            return gc2::importance_weights(richness, tau, epsilon);
        },
        py::arg("richness"), py::arg("tau") = 10.0, py::arg("epsilon") = 1e-8);
    m.def(
        "allocate_ratios",
        [](const std::vector<double>& weights, double retention_ratio) {
            return gc2::allocate_ratios(weights, retention_ratio);
        },
        py::arg("weights"), py::arg("retention_ratio"));
    m.def(
        "plan_budgets",
        [](const std::vector<double>& richness, std::size_t tokens_per_view,
           double retention_ratio, double tau, double alpha, double epsilon,
           const std::string& scorer, const std::string& strategy, const std::string& rounding,
           std::uint64_t seed) {
            const gc2::BudgetPlan plan = gc2::plan_budgets(
                richness, tokens_per_view,
                build_config(retention_ratio, tau, alpha, epsilon, scorer, strategy, rounding,
                             seed));
            py::dict d;
            d["weights"] = plan.weights;
            d["ratios"] = plan.ratios;
            d["counts"] = plan.counts;
            d["total_target"] = plan.total_target;
            return d;
        },
        py::arg("richness"), py::arg("tokens_per_view"), GC2_CONFIG_ARGS);

    // ---- selection ----
    m.def(
        "bilinear_upsample",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& src,
           std::size_t dst_h, std::size_t dst_w) {
            return grid_to_array(gc2::bilinear_upsample(grid_from_array(src), dst_h, dst_w));
        },
        py::arg("src"), py::arg("dst_h"), py::arg("dst_w"));
    m.def(
        "topk_select",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& scores,
           std::size_t k) { return gc2::topk_select(grid_from_array(scores), k); },
        py::arg("scores"), py::arg("k"));
    m.def(
        "compress_image",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& thumb,
           const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>&
               crop_local,
           std::uint32_t rows, std::uint32_t cols, double retention_ratio, double tau,
           double alpha, double epsilon, const std::string& scorer, const std::string& strategy,
           const std::string& rounding, std::uint64_t seed) {
            const gc2::ScoreGrid thumb_grid = grid_from_array(thumb);
            std::vector<gc2::ScoreGrid> locals;
            for (const auto& arr : crop_local)
                locals.push_back(grid_from_array(arr));
            const gc2::CropLayout layout = layout_from_args(
                rows, cols, static_cast<std::uint32_t>(thumb_grid.h),
                static_cast<std::uint32_t>(thumb_grid.w));
            return selection_to_dict(gc2::compress_image(
                thumb_grid, locals, layout,
                build_config(retention_ratio, tau, alpha, epsilon, scorer, strategy, rounding,
                             seed)));
        },
        py::arg("thumb_scores"), py::arg("crop_local_scores"), py::arg("rows"), py::arg("cols"),
        GC2_CONFIG_ARGS,
        "Run the full image pipeline; the thumbnail shape fixes the per-crop grid.");

    // ---- video ----
    m.def(
        "compress_video",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& frames,
           double retention_ratio, double tau, double alpha, double epsilon,
           const std::string& scorer, const std::string& strategy, const std::string& rounding,
           std::uint64_t seed) {
            if (frames.ndim() != 3)
                throw gc2::ShapeError("video tensor must be [frames, tokens, dim]");
            gc2::VideoSequence video;
            const auto t = static_cast<std::size_t>(frames.shape(0));
            const auto n = static_cast<std::size_t>(frames.shape(1));
            const auto d = static_cast<std::size_t>(frames.shape(2));
            for (std::size_t f = 0; f < t; ++f) {
                gc2::TokenMatrix m2{n, d, {}};
                m2.data.assign(frames.data() + f * n * d, frames.data() + (f + 1) * n * d);
                video.frames.push_back(std::move(m2));
            }
            const gc2::VideoSelection sel = gc2::compress_video(
                video, build_config(retention_ratio, tau, alpha, epsilon, scorer, strategy,
                                    rounding, seed));
            py::dict out;
            py::list fr;
            for (const auto& v : sel.frames)
                fr.append(view_to_dict(v));
            out["frames"] = fr;
            out["total_retained"] = sel.total_retained();
            return out;
        },
        py::arg("frames"), GC2_CONFIG_ARGS);

    // ---- cost model ----
    m.def(
        "prefill_flops",
        [](std::uint64_t tokens, std::uint64_t hidden, std::uint64_t ffn, std::uint64_t layers) {
            return gc2::prefill_flops(gc2::ModelDims{tokens, hidden, ffn, layers});
        },
        py::arg("tokens"), py::arg("hidden"), py::arg("ffn"), py::arg("layers"));
    m.def(
        "decode_flops",
        [](std::uint64_t tokens, std::uint64_t hidden, std::uint64_t ffn, std::uint64_t layers) {
            return gc2::decode_flops(gc2::ModelDims{tokens, hidden, ffn, layers});
        },
        py::arg("tokens"), py::arg("hidden"), py::arg("ffn"), py::arg("layers"));
    m.def(
        "reduction_ratio",
        [](std::uint64_t tokens, std::uint64_t hidden, std::uint64_t ffn, std::uint64_t layers,
           double retention_ratio) {
            return gc2::reduction_ratio(gc2::ModelDims{tokens, hidden, ffn, layers},
                                        retention_ratio);
        },
        py::arg("tokens"), py::arg("hidden"), py::arg("ffn"), py::arg("layers"),
        py::arg("retention_ratio"));

    // ---- diagnostics ----
    m.def(
        "synthesize",
        [](const std::string& spec_json) {
            const gc2::SynthScene scene = gc2::synthesize(gc2::parse_synth_spec(spec_json));
            py::dict d;
            d["layout"] = layout_to_dict(scene.layout);
            d["thumb_scores"] = grid_to_array(scene.thumb_scores);
            py::list locals_list;
            for (const auto& g : scene.crop_local_scores)
                locals_list.append(grid_to_array(g));
            d["crop_local_scores"] = locals_list;
            return d;
        },
        py::arg("spec_json"), "Build a deterministic synthetic scene from a JSON spec.");
    m.def(
        "probe_bias",
        [](const std::string& probe_name, const std::string& spec_json, double retention_ratio,
           double tau, double alpha, double epsilon, const std::string& cfg_scorer,
           const std::string& strategy, const std::string& rounding, std::uint64_t seed) {
            gc2::ProbeScorer probe;
            if (probe_name == "globalcom2")
                probe = gc2::ProbeScorer::GlobalCom2;
            else if (probe_name == "position_weighted")
                probe = gc2::ProbeScorer::PositionWeighted;
            else
                throw gc2::ConfigError("unknown probe scorer \"" + probe_name + "\"");
            const gc2::SynthScene scene = gc2::synthesize(gc2::parse_synth_spec(spec_json));
            const gc2::BiasReport report = gc2::probe_bias(
                probe, scene,
                build_config(retention_ratio, tau, alpha, epsilon, cfg_scorer, strategy, rounding,
                             seed));
            py::dict d;
            d["budgets_forward"] = report.budgets_forward;
            d["budgets_reversed"] = report.budgets_reversed;
            d["bias_score"] = report.bias_score;
            return d;
        },
        py::arg("probe"), py::arg("spec_json"), GC2_CONFIG_ARGS);
    m.def(
        "render_mask",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& scores,
           const std::vector<std::size_t>& retained, const std::filesystem::path& path) {
            gc2::render_mask(grid_from_array(scores), retained, path);
        },
        py::arg("scores"), py::arg("retained"), py::arg("path"),
        "Write a PGM mask of retained (255) vs discarded (64) cells.");
}
