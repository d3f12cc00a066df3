"""Exact decision procedures for qualitative distance problems on labelled MDPs."""
from .model import Lmc, Mdp, Verdict, induce, word_prob
from .trace import md_vector_basis, tv_gt0, lmc_trace_equiv
from .bisim import lmc_bisim, optimistic_refine, minimizing_strategy, pb_gt0
from .distance import lmc_pb_eq1, lmc_tv_lt1, pb_eq0, pb_eq1, pb_lt1, md_underapprox

__all__ = [
    "Lmc", "Mdp", "Verdict", "induce", "word_prob",
    "md_vector_basis", "tv_gt0", "lmc_trace_equiv",
    "lmc_bisim", "optimistic_refine", "minimizing_strategy", "pb_gt0",
    "lmc_pb_eq1", "lmc_tv_lt1", "pb_eq0", "pb_eq1", "pb_lt1", "md_underapprox",
]
