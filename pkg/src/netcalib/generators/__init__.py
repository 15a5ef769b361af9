"""Seeded network models: CBA, forest fire, degree-corrected SBM and 2K."""
from __future__ import annotations

from dataclasses import asdict, dataclass

from ..graph import Graph
from .cba import generate_cba
from .ff import generate_ff
from .sbm import (BlockPartition, description_length, fit_sbm_partition, sample_dcsbm,
                  sample_stub_pairs)
from .twok import ConstructionError, JointDegreeMatrix, construct_2k, extract_jdm

MODELS = ("CBA", "FF", "SBM", "TWO_K")
MODEL_LABELS = {"CBA": "CBA", "FF": "FF", "SBM": "SBM", "TWO_K": "2K"}

# parameters that matter for each model
MODEL_PARAMS = {
    "CBA": ("cba_m", "cba_p"),
    "FF": ("ff_burn_p",),
    "SBM": ("sbm_blocks",),
    "TWO_K": (),
}


@dataclass(frozen=True)
class ModelParams:
    model_id: str
    n_target: int
    cba_m: int = 1
    cba_p: float = 0.0
    ff_burn_p: float = 0.0
    sbm_blocks: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.model_id not in MODELS:
            raise ValueError(f"unknown model {self.model_id!r}")

    def active(self) -> dict:
        """Only the fields the model uses."""
        d = asdict(self)
        return {name: d[name] for name in MODEL_PARAMS[self.model_id]}


def generate(params: ModelParams, target: Graph, *key) -> Graph:
    """One realisation of ``params`` calibrated against ``target``.

    SBM and 2K read their block structure or JDM from the target; the
    growth models only need its node count.
    """
    if params.model_id == "CBA":
        return generate_cba(params.n_target, params.cba_m, params.cba_p, params.seed, *key)
    if params.model_id == "FF":
        return generate_ff(params.n_target, params.ff_burn_p, params.seed, *key)
    if params.model_id == "SBM":
        return sample_dcsbm(fit_sbm_partition(target, params.sbm_blocks), params.seed, *key)
    return construct_2k(extract_jdm(target), params.seed, *key)


__all__ = [
    "BlockPartition", "ConstructionError", "JointDegreeMatrix", "MODELS", "MODEL_LABELS",
    "MODEL_PARAMS", "ModelParams", "construct_2k", "description_length", "extract_jdm",
    "fit_sbm_partition", "generate", "generate_cba", "generate_ff", "sample_dcsbm",
    "sample_stub_pairs",
]
