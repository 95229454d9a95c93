// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gc2/tensor.hpp"
#include "../unit/helpers.hpp"

using testutil::TempDir;

namespace {

struct RunResult {
    int status = -1;
    std::string output;  // stdout and stderr combined
};

std::string binary_path() {
    const char* env = std::getenv("GC2_BIN");
    REQUIRE_MESSAGE(env != nullptr, "GC2_BIN must point at the CLI binary");
    return env;
}

RunResult run(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + binary_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.output.append(buf, got);
    const int wait_status = pclose(pipe);
    res.status = WIFEXITED(wait_status) ? WEXITSTATUS(wait_status) : -1;
    return res;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// 2x2 crop scene over an 8x8 grid with one saliency bump.
const char* kSceneSpec =
    R"({"h": 8, "w": 8, "a": 2, "b": 2, "d": 4,
        "centers": [[2.0, 3.0, 1.5, 1.0]], "noise_scale": 0.05, "seed": 7})";

}  // namespace

TEST_CASE("help and usage errors") {
    CHECK(run("--help").status == 0);
    CHECK(run("flops --help").status == 0);

    RunResult none = run("");
    CHECK(none.status == 1);
    CHECK(none.output.find("error: ") != std::string::npos);

    CHECK(run("no-such-command").status == 1);
    CHECK(run("compress-image").status == 1);  // missing required flags
}

TEST_CASE("flops prints the analytic model") {
    RunResult r = run("flops --tokens 2880 --hidden 4096 --ffn 11008 --layers 32 --ratio 0.10");
    CHECK(r.status == 0);
    CHECK(r.output.find("prefill_flops: 4.165e+13") != std::string::npos);
    CHECK(r.output.find("decode_flops_per_token: 2.494e+13") != std::string::npos);
    CHECK(r.output.find("reduction_ratio: 0.909") != std::string::npos);

    RunResult bare = run("flops --tokens 576 --hidden 1024 --ffn 2816 --layers 24");
    CHECK(bare.status == 0);
    CHECK(bare.output.find("prefill_flops:") != std::string::npos);
    CHECK(bare.output.find("reduction_ratio:") == std::string::npos);

    CHECK(run("flops --tokens 0 --hidden 4096 --ffn 11008 --layers 32").status == 1);
    CHECK(run("flops --tokens 10 --hidden 10 --ffn 10 --layers 1 --ratio 0").status == 1);
    CHECK(run("flops --tokens 10 --hidden 10 --ffn 10 --layers 1 --ratio 1.2").status == 1);
}

TEST_CASE("synth writes a deterministic fixture") {
    TempDir dir("cli_synth");
    write_file(dir.file("spec.json"), kSceneSpec);

    RunResult a = run("synth --spec " + dir.file("spec.json") + " --out-dir " + dir.file("a"));
    REQUIRE_MESSAGE(a.status == 0, a.output);
    RunResult b = run("synth --spec " + dir.file("spec.json") + " --out-dir " + dir.file("b"));
    REQUIRE(b.status == 0);

    for (const char* name : {"thumb_scores.gct", "crop_local_scores.gct", "crop_tokens.gct"}) {
        auto fa = testutil::read_bytes(dir.file("a/") + name);
        auto fb = testutil::read_bytes(dir.file("b/") + name);
        REQUIRE(!fa.empty());
        CHECK(fa == fb);
    }

    gc2::Tensor thumb = gc2::read_tensor(dir.file("a/thumb_scores.gct"));
    CHECK(thumb.dims == std::vector<std::uint32_t>{8, 8});
    gc2::Tensor locals = gc2::read_tensor(dir.file("a/crop_local_scores.gct"));
    CHECK(locals.dims == std::vector<std::uint32_t>{4, 8, 8});
    gc2::Tensor tokens = gc2::read_tensor(dir.file("a/crop_tokens.gct"));
    CHECK(tokens.dims == std::vector<std::uint32_t>{4, 64, 4});

    CHECK(run("synth --spec " + dir.file("missing.json") + " --out-dir " + dir.file("c")).status == 2);
    write_file(dir.file("bad.json"), "{\"h\": 0}");
    CHECK(run("synth --spec " + dir.file("bad.json") + " --out-dir " + dir.file("c")).status == 2);
}

TEST_CASE("compress-image end to end") {
    TempDir dir("cli_image");
    write_file(dir.file("spec.json"), kSceneSpec);
    REQUIRE(run("synth --spec " + dir.file("spec.json") + " --out-dir " + dir.path.string()).status == 0);

    const std::string base = "compress-image --thumb " + dir.file("thumb_scores.gct") +
                             " --crops " + dir.file("crop_local_scores.gct") + " --layout 2x2";

    RunResult r = run(base + " --ratio 0.25 --out " + dir.file("sel.json"));
    REQUIRE_MESSAGE(r.status == 0, r.output);

    nlohmann::json sel = nlohmann::json::parse(std::ifstream(dir.file("sel.json")));
    CHECK(sel["thumbnail"]["ratio"].get<double>() == 0.25);
    CHECK(sel["thumbnail"]["retained"].size() == 16);  // round(0.25 * 64)
    REQUIRE(sel["crops"].size() == 4);
    std::size_t crop_total = 0;
    for (const auto& crop : sel["crops"]) crop_total += crop["retained"].size();
    CHECK(crop_total == 64);  // round(0.25 * 64 * 4)

    SUBCASE("byte identical across runs") {
        RunResult again = run(base + " --ratio 0.25 --out " + dir.file("sel2.json"));
        REQUIRE(again.status == 0);
        CHECK(testutil::read_bytes(dir.file("sel.json")) == testutil::read_bytes(dir.file("sel2.json")));
    }

    SUBCASE("render masks") {
        RunResult rr = run(base + " --ratio 0.25 --out " + dir.file("sel3.json") +
                           " --render-dir " + dir.file("masks"));
        REQUIRE_MESSAGE(rr.status == 0, rr.output);
        for (const char* name : {"thumb.pgm", "crop_0.pgm", "crop_1.pgm", "crop_2.pgm", "crop_3.pgm"}) {
            auto bytes = testutil::read_bytes(dir.file("masks/") + name);
            REQUIRE(bytes.size() == 11 + 64);
            CHECK(std::string(bytes.begin(), bytes.begin() + 11) == "P5\n8 8\n255\n");
        }
    }

    SUBCASE("flag validation") {
        CHECK(run(base + " --out " + dir.file("x.json")).status == 1);  // no ratio anywhere
        CHECK(run(base + " --ratio 0 --out " + dir.file("x.json")).status == 1);
        CHECK(run(base + " --ratio 0.25 --tau 0 --out " + dir.file("x.json")).status == 1);
        CHECK(run(base + " --ratio 0.25 --alpha 1.5 --out " + dir.file("x.json")).status == 1);
    }

    SUBCASE("layout crop count must match the stack") {
        const std::string wrong = "compress-image --thumb " + dir.file("thumb_scores.gct") +
                                  " --crops " + dir.file("crop_local_scores.gct") +
                                  " --layout 1x3 --ratio 0.25 --out " + dir.file("x.json");
        RunResult mismatch = run(wrong);
        CHECK(mismatch.status == 2);
        CHECK(mismatch.output.find("error: ") != std::string::npos);
        CHECK(run(base + " --ratio 0.25 --layout 2y2 --out " + dir.file("x.json")).status == 1);
    }

    SUBCASE("garbage tensor input") {
        write_file(dir.file("junk.gct"), "not a tensor");
        CHECK(run("compress-image --thumb " + dir.file("junk.gct") + " --crops " +
                  dir.file("crop_local_scores.gct") + " --layout 2x2 --ratio 0.25 --out " +
                  dir.file("x.json")).status == 2);
    }
}

TEST_CASE("config file and environment fallback") {
    TempDir dir("cli_cfg");
    write_file(dir.file("spec.json"), kSceneSpec);
    REQUIRE(run("synth --spec " + dir.file("spec.json") + " --out-dir " + dir.path.string()).status == 0);
    const std::string base = "compress-image --thumb " + dir.file("thumb_scores.gct") +
                             " --crops " + dir.file("crop_local_scores.gct") + " --layout 2x2";

    write_file(dir.file("cfg.json"), R"({"retention_ratio": 0.25, "strategy": "softmax_max"})");

    RunResult via_flag = run(base + " --config " + dir.file("cfg.json") + " --out " + dir.file("a.json"));
    REQUIRE_MESSAGE(via_flag.status == 0, via_flag.output);

    RunResult via_env = run(base + " --out " + dir.file("b.json"),
                            "GC2_CONFIG=" + dir.file("cfg.json") + " ");
    REQUIRE_MESSAGE(via_env.status == 0, via_env.output);
    CHECK(testutil::read_bytes(dir.file("a.json")) == testutil::read_bytes(dir.file("b.json")));

    // Inline flags override file values.
    RunResult overridden = run(base + " --config " + dir.file("cfg.json") + " --ratio 0.5 --out " +
                               dir.file("c.json"));
    REQUIRE(overridden.status == 0);
    nlohmann::json loaded = nlohmann::json::parse(std::ifstream(dir.file("c.json")));
    CHECK(loaded["thumbnail"]["ratio"].get<double>() == 0.5);

    write_file(dir.file("bad_cfg.json"), R"({"retention_ratio": 0.25, "temperature": 3})");
    CHECK(run(base + " --config " + dir.file("bad_cfg.json") + " --out " + dir.file("x.json")).status == 2);
    write_file(dir.file("range_cfg.json"), R"({"retention_ratio": 0.25, "tau": 0.0})");
    CHECK(run(base + " --config " + dir.file("range_cfg.json") + " --out " + dir.file("x.json")).status == 2);
    CHECK(run(base + " --config " + dir.file("nope.json") + " --out " + dir.file("x.json")).status == 2);
    CHECK(run(base + " --out " + dir.file("x.json"), "GC2_CONFIG=" + dir.file("nope.json") + " ").status == 2);
}

TEST_CASE("compress-video end to end") {
    TempDir dir("cli_video");
    gc2::Tensor video;
    video.dims = {2, 4, 3};
    video.data = {1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1,
                  1, 1, 0, 0, 1, 1, 1, 0, 1, 0.5f, 0.5f, 0.5f};
    gc2::write_tensor(video, dir.file("video.gct"));

    RunResult r = run("compress-video --video " + dir.file("video.gct") + " --ratio 0.5 --out " +
                      dir.file("v.json"));
    REQUIRE_MESSAGE(r.status == 0, r.output);
    nlohmann::json sel = nlohmann::json::parse(std::ifstream(dir.file("v.json")));
    REQUIRE(sel["frames"].size() == 2);
    std::size_t total = 0;
    for (const auto& f : sel["frames"]) total += f["retained"].size();
    CHECK(total == 4);  // round(0.5 * 4 * 2)

    gc2::Tensor flat;
    flat.dims = {4, 3};
    flat.data.assign(12, 1.0f);
    gc2::write_tensor(flat, dir.file("flat.gct"));
    CHECK(run("compress-video --video " + dir.file("flat.gct") + " --ratio 0.5 --out " +
              dir.file("x.json")).status == 2);
}

TEST_CASE("probe-bias reports the positional skew") {
    TempDir dir("cli_probe");
    write_file(dir.file("spec.json"), kSceneSpec);

    RunResult honest = run("probe-bias --scorer globalcom2 --spec " + dir.file("spec.json") +
                           " --ratio 0.25");
    REQUIRE_MESSAGE(honest.status == 0, honest.output);
    nlohmann::json hj = nlohmann::json::parse(honest.output);
    CHECK(hj["bias_score"].get<double>() == 0.0);

    RunResult skewed = run("probe-bias --scorer position_weighted --spec " + dir.file("spec.json") +
                           " --ratio 0.25");
    REQUIRE(skewed.status == 0);
    nlohmann::json sj = nlohmann::json::parse(skewed.output);
    CHECK(sj["bias_score"].get<double>() > 0.0);
    CHECK(sj["budgets_forward"] == sj["budgets_reversed"]);

    CHECK(run("probe-bias --scorer nonsense --spec " + dir.file("spec.json") + " --ratio 0.25")
              .status == 1);
}

TEST_CASE("render-mask writes the retention bitmap") {
    TempDir dir("cli_mask");
    gc2::Tensor scores;
    scores.dims = {2, 2};
    scores.data = {0.1f, 0.2f, 0.3f, 0.4f};
    gc2::write_tensor(scores, dir.file("scores.gct"));

    RunResult r = run("render-mask --scores " + dir.file("scores.gct") + " --retained 0,3 --out " +
                      dir.file("m.pgm"));
    REQUIRE_MESSAGE(r.status == 0, r.output);
    auto bytes = testutil::read_bytes(dir.file("m.pgm"));
    REQUIRE(bytes.size() == 15);
    CHECK(std::string(bytes.begin(), bytes.begin() + 11) == "P5\n2 2\n255\n");
    CHECK(bytes[11] == 255);
    CHECK(bytes[12] == 64);
    CHECK(bytes[13] == 64);
    CHECK(bytes[14] == 255);

    CHECK(run("render-mask --scores " + dir.file("scores.gct") + " --retained 0,9 --out " +
              dir.file("m.pgm")).status == 2);
    CHECK(run("render-mask --scores " + dir.file("scores.gct") + " --retained 1,x --out " +
              dir.file("m.pgm")).status == 1);
    RunResult empty = run("render-mask --scores " + dir.file("scores.gct") + " --out " +
                          dir.file("e.pgm"));
    CHECK(empty.status == 0);
    auto ebytes = testutil::read_bytes(dir.file("e.pgm"));
    CHECK(ebytes[11] == 64);
}
