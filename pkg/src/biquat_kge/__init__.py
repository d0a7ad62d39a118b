"""Knowledge-graph embeddings over biquaternions.

Entities and relations live in vectors of biquaternions; a relation acts
on a head entity by translation followed by a slot-wise Hamilton product,
which composes scaling with circular and hyperbolic rotations.  Training
minimizes a cross-entropy over all candidate tails with an N3 penalty,
and evaluation reports filtered MRR / Hits@k under worst-case ties.
"""

from . import backends
from .algebra import (Biquaternion, Factorization, Quaternion, factorize,
                      factorize_right)
from .checkpoint import load_checkpoint, save_checkpoint
from .data import (KnowledgeGraph, Triple, build_filter, build_graph,
                   load_split, write_split)
from .evaluate import EvalReport, evaluate, rank_bottom
from .exceptions import Error
from .model import (GradientBuffer, ModelParameters, hamilton_transform,
                    init_parameters, loss_and_grad, normalize_rotation, score,
                    score_all_tails, translate)
from .train import AdagradState, TrainConfig, TrainResult, adagrad_step, train

__version__ = "0.1.0"

__all__ = [
    "AdagradState", "Biquaternion", "EvalReport", "Error", "Factorization",
    "GradientBuffer", "KnowledgeGraph", "ModelParameters", "Quaternion",
    "TrainConfig", "TrainResult", "Triple", "adagrad_step", "backends",
    "build_filter", "build_graph", "evaluate", "factorize", "factorize_right",
    "hamilton_transform", "init_parameters", "load_checkpoint", "load_split",
    "loss_and_grad", "normalize_rotation", "rank_bottom", "save_checkpoint",
    "score", "score_all_tails", "train", "translate", "write_split",
]
