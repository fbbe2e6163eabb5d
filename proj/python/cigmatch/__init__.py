"""Concept-interaction-graph document pair matching."""

from ._cigmatch import (
    DatasetSplit,
    LabeledPair,
    Matcher,
    ModelConfig,
    build_cig_json,
    config_for_variant,
    extract_keywords,
    gen_synthetic,
    load_jsonl,
    save_jsonl,
    similarity_profile,
    split,
    train,
    variant_names,
)

__all__ = [
    "DatasetSplit",
    "LabeledPair",
    "Matcher",
    "ModelConfig",
    "build_cig_json",
    "config_for_variant",
    "extract_keywords",
    "gen_synthetic",
    "load_jsonl",
    "save_jsonl",
    "similarity_profile",
    "split",
    "train",
    "variant_names",
]
