# Copyright (C) 2026 globalcom2 contributors
# SPDX-License-Identifier: Apache-2.0
"""Token compression for dynamic-cropping vision-language pipelines."""

from _globalcom2 import (
    Error,
    allocate_ratios,
    bilinear_upsample,
    cls_attention_scores,
    compress_image,
    compress_video,
    decode_flops,
    importance_weights,
    neg_global_mean_similarity_scores,
    neg_patch_attention_scores,
    plan_budgets,
    prefill_flops,
    probe_bias,
    read_tensor,
    reduction_ratio,
    render_mask,
    select_grid,
    synthesize,
    topk_select,
    write_tensor,
)

__all__ = [
    "Error",
    "allocate_ratios",
    "bilinear_upsample",
    "cls_attention_scores",
    "compress_image",
    "compress_video",
    "decode_flops",
    "importance_weights",
    "neg_global_mean_similarity_scores",
    "neg_patch_attention_scores",
    "plan_budgets",
    "prefill_flops",
    "probe_bias",
    "read_tensor",
    "reduction_ratio",
    "render_mask",
    "select_grid",
    "synthesize",
    "topk_select",
    "write_tensor",
]

__version__ = "0.1.0"
