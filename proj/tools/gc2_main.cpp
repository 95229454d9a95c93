// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gc2/budget.hpp"
#include "gc2/config.hpp"
#include "gc2/diagnostics.hpp"
#include "gc2/errors.hpp"
#include "gc2/flops.hpp"
#include "gc2/layout.hpp"
#include "gc2/selector.hpp"
#include "gc2/tensor.hpp"
#include "gc2/video.hpp"

namespace {

// Flag-level problems map to exit 1; library errors (bad files, bad shapes)
// map to exit 2; anything else is an internal failure, exit 3.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigFlags {
    std::string path;
    std::optional<double> ratio;
    std::optional<double> tau;
    std::optional<double> alpha;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
    cmd->add_option("--config", flags.path, "JSON config file (default: $GC2_CONFIG)");
    cmd->add_option("--ratio", flags.ratio, "retention ratio in (0, 1]");
    cmd->add_option("--tau", flags.tau, "softmax temperature");
    cmd->add_option("--alpha", flags.alpha, "global/local blend weight");
}

gc2::CompressionConfig resolve_config(const ConfigFlags& flags) {
    if (flags.ratio && (!(*flags.ratio > 0.0) || *flags.ratio > 1.0))
        throw UsageError("--ratio must be in (0, 1]");
    if (flags.tau && !(*flags.tau > 0.0))
        throw UsageError("--tau must be positive");
    if (flags.alpha && (*flags.alpha < 0.0 || *flags.alpha > 1.0))
        throw UsageError("--alpha must be in [0, 1]");

    std::string path = flags.path;
    if (path.empty())
        if (const char* env = std::getenv("GC2_CONFIG"))
            path = env;

    nlohmann::json merged = nlohmann::json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in)
            throw gc2::IoError("cannot open config file " + path);
        const std::string text((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
        merged = nlohmann::json::parse(text, nullptr, false);
        if (merged.is_discarded() || !merged.is_object())
            throw gc2::ConfigError("config: " + path + " is not a JSON object");
    }
    if (flags.ratio)
        merged["retention_ratio"] = *flags.ratio;
    if (flags.tau)
        merged["tau"] = *flags.tau;
    if (flags.alpha)
        merged["alpha"] = *flags.alpha;
    if (!merged.contains("retention_ratio"))
        throw UsageError("retention ratio required (--ratio or config file)");
    return gc2::parse_config(merged.dump());
}

gc2::ScoreGrid grid_from_tensor(const gc2::Tensor& t, const std::string& name) {
    if (t.dims.size() != 2)
        throw gc2::ShapeError(name + ": expected a rank-2 [h, w] tensor, got rank " +
                              std::to_string(t.dims.size()));
    gc2::ScoreGrid g{t.dims[0], t.dims[1], {}};
    g.values.assign(t.data.begin(), t.data.end());
    return g;
}

std::vector<gc2::ScoreGrid> grids_from_stack(const gc2::Tensor& t, const std::string& name) {
    if (t.dims.size() == 2)
        return {grid_from_tensor(t, name)};
    if (t.dims.size() != 3)
        throw gc2::ShapeError(name + ": expected rank-2 or rank-3 tensor, got rank " +
                              std::to_string(t.dims.size()));
    std::vector<gc2::ScoreGrid> grids(t.dims[0]);
    const std::size_t cells = std::size_t(t.dims[1]) * t.dims[2];
    for (std::size_t j = 0; j < grids.size(); ++j) {
        grids[j] = gc2::ScoreGrid{t.dims[1], t.dims[2], {}};
        const auto begin = t.data.begin() + static_cast<std::ptrdiff_t>(j * cells);
        grids[j].values.assign(begin, begin + static_cast<std::ptrdiff_t>(cells));
    }
    return grids;
}

void parse_layout(const std::string& text, std::uint32_t& a, std::uint32_t& b) {
    const auto x = text.find('x');
    std::size_t used_a = 0, used_b = 0;
    try {
        if (x == std::string::npos)
            throw std::invalid_argument("no separator");
        a = static_cast<std::uint32_t>(std::stoul(text.substr(0, x), &used_a));
        b = static_cast<std::uint32_t>(std::stoul(text.substr(x + 1), &used_b));
        if (used_a != x || used_b != text.size() - x - 1 || a == 0 || b == 0)
            throw std::invalid_argument("bad layout");
    } catch (const std::exception&) {
        throw UsageError("--layout must look like 2x2");
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw gc2::IoError("cannot open " + path.string() + " for writing");
    out << text << '\n';
    if (!out)
        throw gc2::IoError("write failed for " + path.string());
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw gc2::IoError("cannot open " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

gc2::Tensor tensor_from_grid(const gc2::ScoreGrid& g) {
    gc2::Tensor t;
    t.dims = {static_cast<std::uint32_t>(g.h), static_cast<std::uint32_t>(g.w)};
    t.data.assign(g.values.begin(), g.values.end());
    return t;
}

int run_compress_image(const std::string& thumb_path, const std::vector<std::string>& crop_paths,
                       const std::string& layout_text, const ConfigFlags& cfg_flags,
                       const std::string& out_path, const std::string& render_dir) {
    const gc2::CompressionConfig cfg = resolve_config(cfg_flags);
    std::uint32_t a = 0, b = 0;
    parse_layout(layout_text, a, b);

    const gc2::ScoreGrid thumb = grid_from_tensor(gc2::read_tensor(thumb_path), "--thumb");
    std::vector<gc2::ScoreGrid> crops;
    if (crop_paths.size() == 1) {
        crops = grids_from_stack(gc2::read_tensor(crop_paths[0]), "--crops");
    } else {
        for (const auto& p : crop_paths)
            crops.push_back(grid_from_tensor(gc2::read_tensor(p), "--crops"));
    }

    const gc2::CropLayout layout{a, b, static_cast<std::uint32_t>(thumb.h),
                                 static_cast<std::uint32_t>(thumb.w)};
    const gc2::SelectionResult result = gc2::compress_image(thumb, crops, layout, cfg);
    write_text(out_path, gc2::to_json(result));

    if (!render_dir.empty()) {
        const std::filesystem::path dir(render_dir);
        std::filesystem::create_directories(dir);
        gc2::render_mask(thumb, result.thumbnail.retained, dir / "thumb.pgm");
        for (std::size_t j = 0; j < crops.size(); ++j)
            gc2::render_mask(crops[j], result.crops[j].retained,
                             dir / ("crop_" + std::to_string(j) + ".pgm"));
    }
    return 0;
}

int run_compress_video(const std::string& video_path, const ConfigFlags& cfg_flags,
                       const std::string& out_path) {
    const gc2::CompressionConfig cfg = resolve_config(cfg_flags);
    const gc2::VideoSequence video = gc2::video_from_tensor(gc2::read_tensor(video_path));
    write_text(out_path, gc2::to_json(gc2::compress_video(video, cfg)));
    return 0;
}

int run_flops(std::uint64_t tokens, std::uint64_t hidden, std::uint64_t ffn, std::uint64_t layers,
              std::optional<double> ratio) {
    if (tokens == 0 || hidden == 0 || ffn == 0 || layers == 0)
        throw UsageError("model dimensions must be positive");
    if (ratio && (!(*ratio > 0.0) || *ratio > 1.0))
        throw UsageError("--ratio must be in (0, 1]");

    const gc2::ModelDims dims{tokens, hidden, ffn, layers};
    std::printf("prefill_flops: %.3e\n", gc2::prefill_flops(dims));
    std::printf("decode_flops_per_token: %.3e\n", gc2::decode_flops(dims));
    if (ratio)
        std::printf("reduction_ratio: %.3f\n", gc2::reduction_ratio(dims, *ratio));
    return 0;
}

int run_probe_bias(const std::string& scorer_name, const std::string& spec_path,
                   const ConfigFlags& cfg_flags) {
    gc2::ProbeScorer scorer;
    if (scorer_name == "globalcom2")
        scorer = gc2::ProbeScorer::GlobalCom2;
    else if (scorer_name == "position_weighted")
        scorer = gc2::ProbeScorer::PositionWeighted;
    else
        throw UsageError("--scorer must be globalcom2 or position_weighted");

    const gc2::CompressionConfig cfg = resolve_config(cfg_flags);
    const gc2::SynthScene scene = gc2::synthesize(gc2::parse_synth_spec(slurp(spec_path)));
    std::cout << gc2::to_json(gc2::probe_bias(scorer, scene, cfg)) << '\n';
    return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_dir) {
    const gc2::SynthSpec spec = gc2::parse_synth_spec(slurp(spec_path));
    const gc2::SynthScene scene = gc2::synthesize(spec);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);

    gc2::write_tensor(tensor_from_grid(scene.thumb_scores), dir / "thumb_scores.gct");

    gc2::Tensor locals;
    locals.dims = {static_cast<std::uint32_t>(scene.crop_local_scores.size()),
                   static_cast<std::uint32_t>(spec.h), static_cast<std::uint32_t>(spec.w)};
    for (const auto& g : scene.crop_local_scores)
        locals.data.insert(locals.data.end(), g.values.begin(), g.values.end());
    gc2::write_tensor(locals, dir / "crop_local_scores.gct");

    gc2::Tensor tokens;
    tokens.dims = {static_cast<std::uint32_t>(scene.crop_tokens.size()),
                   static_cast<std::uint32_t>(spec.h * spec.w),
                   static_cast<std::uint32_t>(spec.d)};
    for (const auto& m : scene.crop_tokens)
        tokens.data.insert(tokens.data.end(), m.data.begin(), m.data.end());
    gc2::write_tensor(tokens, dir / "crop_tokens.gct");
    return 0;
}

int run_render_mask(const std::string& scores_path, const std::string& retained_csv,
                    const std::string& out_path) {
    const gc2::ScoreGrid scores = grid_from_tensor(gc2::read_tensor(scores_path), "--scores");
    std::vector<std::size_t> retained;
    std::size_t pos = 0;
    while (pos < retained_csv.size()) {
        const auto comma = retained_csv.find(',', pos);
        const std::string item =
            retained_csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) {
            std::size_t used = 0;
            unsigned long long v = 0;
            try {
                v = std::stoull(item, &used);
            } catch (const std::exception&) {
                throw UsageError("--retained must be a comma-separated index list");
            }
            if (used != item.size())
                throw UsageError("--retained must be a comma-separated index list");
            retained.push_back(static_cast<std::size_t>(v));
        }
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    gc2::render_mask(scores, retained, out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"global-to-local visual token compression toolkit"};
    app.require_subcommand(1);

    // compress-image
    auto* image = app.add_subcommand("compress-image", "select tokens for thumbnail + crops");
    std::string thumb_path, layout_text = "1x1", image_out, render_dir;
    std::vector<std::string> crop_paths;
    ConfigFlags image_cfg;
    image->add_option("--thumb", thumb_path, "thumbnail score tensor [h, w]")->required();
    image->add_option("--crops", crop_paths, "crop score tensor [n, h, w] or n rank-2 files")
        ->required();
    image->add_option("--layout", layout_text, "crop arrangement, e.g. 2x2")->required();
    image->add_option("--out", image_out, "output JSON path")->required();
    image->add_option("--render-dir", render_dir, "also write PGM masks here");
    add_config_flags(image, image_cfg);

    // compress-video
    auto* video = app.add_subcommand("compress-video", "select tokens per frame");
    std::string video_path, video_out;
    ConfigFlags video_cfg;
    video->add_option("--video", video_path, "embedding tensor [T, N, D]")->required();
    video->add_option("--out", video_out, "output JSON path")->required();
    add_config_flags(video, video_cfg);

    // flops
    auto* flops = app.add_subcommand("flops", "analytic FLOPs model");
    std::uint64_t tokens = 0, hidden = 0, ffn = 0, layers = 0;
    std::optional<double> flops_ratio;
    flops->add_option("--tokens", tokens, "prefill sequence length T")->required();
    flops->add_option("--hidden", hidden, "hidden size d")->required();
    flops->add_option("--ffn", ffn, "FFN intermediate size m")->required();
    flops->add_option("--layers", layers, "layer count L")->required();
    flops->add_option("--ratio", flops_ratio, "retention ratio for the reduction estimate");

    // probe-bias
    auto* probe = app.add_subcommand("probe-bias", "order-reversal budget bias probe");
    std::string probe_scorer, probe_spec;
    ConfigFlags probe_cfg;
    probe->add_option("--scorer", probe_scorer, "globalcom2 or position_weighted")->required();
    probe->add_option("--spec", probe_spec, "scene spec JSON path")->required();
    add_config_flags(probe, probe_cfg);

    // synth
    auto* synth = app.add_subcommand("synth", "write a deterministic fixture scene");
    std::string synth_spec, synth_dir;
    synth->add_option("--spec", synth_spec, "scene spec JSON path")->required();
    synth->add_option("--out-dir", synth_dir, "output directory")->required();

    // render-mask
    auto* render = app.add_subcommand("render-mask", "write a retention mask PGM");
    std::string render_scores, render_retained, render_out;
    render->add_option("--scores", render_scores, "score tensor [h, w]")->required();
    render->add_option("--retained", render_retained, "comma-separated retained indices");
    render->add_option("--out", render_out, "output PGM path")->required();

    try {
        app.parse(argc, argv);
        if (image->parsed())
            return run_compress_image(thumb_path, crop_paths, layout_text, image_cfg, image_out,
                                      render_dir);
        if (video->parsed())
            return run_compress_video(video_path, video_cfg, video_out);
        if (flops->parsed())
            return run_flops(tokens, hidden, ffn, layers, flops_ratio);
        if (probe->parsed())
            return run_probe_bias(probe_scorer, probe_spec, probe_cfg);
        if (synth->parsed())
            return run_synth(synth_spec, synth_dir);
        if (render->parsed())
            return run_render_mask(render_scores, render_retained, render_out);
        throw UsageError("no subcommand given");
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const gc2::AllocationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const gc2::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
