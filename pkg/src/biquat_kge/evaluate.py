"""Filtered link-prediction ranking with worst-case tie handling.

Every triple of a split becomes one tail-prediction query (head queries
are covered by the reciprocal triples).  Known-true competitor tails are
removed from the candidate pool, and the true tail is ranked below every
candidate that ties its score exactly, which is the strictest possible
convention.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import FilterIndex, KnowledgeGraph, RECIPROCAL_SUFFIX
from .model import ModelParameters, score_tails_batch

_EVAL_CHUNK = 256


@dataclass
class RelationMetrics:
    name: str
    count: int
    mrr: float
    hits10: float


@dataclass
class EvalReport:
    split: str
    n_queries: int
    mrr: float
    hits: dict[int, float]
    per_relation: dict[int, RelationMetrics] = field(default_factory=dict)
    per_relation_merged: dict[int, RelationMetrics] = field(default_factory=dict)


def rank_bottom(scores: np.ndarray, true_id: int, filtered_out) -> int:
    """1-based rank of the true entity, ties counted against it.

    ``filtered_out`` lists entity ids removed from the candidate pool
    (known-true competitors); it must not contain ``true_id``.
    """
    scores = np.asarray(scores)
    true_score = scores[true_id]
    keep = np.ones(len(scores), dtype=bool)
    for idx in filtered_out:
        keep[idx] = False
    keep[true_id] = False
    return 1 + int((scores[keep] >= true_score).sum())


def _ranks_for_chunk(params, kg_filter, triples) -> np.ndarray:
    heads = np.fromiter((t.head for t in triples), dtype=np.int64)
    rels = np.fromiter((t.relation for t in triples), dtype=np.int64)
    scores = score_tails_batch(params, heads, rels)
    ranks = np.empty(len(triples), dtype=np.int64)
    for i, triple in enumerate(triples):
        known = kg_filter.get((triple.head, triple.relation), ())
        filtered = [t for t in known if t != triple.tail]
        ranks[i] = rank_bottom(scores[i], triple.tail, filtered)
    return ranks


def compute_ranks(params: ModelParameters, kg: KnowledgeGraph, split: str,
                  kg_filter: FilterIndex, n_workers: int = 1) -> np.ndarray:
    """Rank of the true tail for every query of the split, in split order."""
    triples = kg.split(split)
    chunks = [triples[i:i + _EVAL_CHUNK] for i in range(0, len(triples), _EVAL_CHUNK)]
    ranks = np.empty(len(triples), dtype=np.int64)
    if n_workers <= 1 or len(chunks) <= 1:
        results = [_ranks_for_chunk(params, kg_filter, c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(
                lambda c: _ranks_for_chunk(params, kg_filter, c), chunks))
    offset = 0
    for chunk, chunk_ranks in zip(chunks, results):
        ranks[offset:offset + len(chunk)] = chunk_ranks
        offset += len(chunk)
    return ranks


def _metrics(ranks: np.ndarray) -> tuple[float, dict[int, float]]:
    reciprocal = 1.0 / ranks
    mrr = float(reciprocal.mean())
    hits = {k: float((ranks <= k).mean()) for k in (1, 3, 10)}
    return mrr, hits


def evaluate(params: ModelParameters, kg: KnowledgeGraph, split: str,
             kg_filter: FilterIndex, n_workers: int = 1) -> EvalReport:
    """Filtered MRR and Hits@{1,3,10}, overall and per relation."""
    if (params.n_entities, params.n_relations) != (kg.n_entities, kg.n_relations):
        raise ValueError(
            f"parameters cover {params.n_entities} entities / "
            f"{params.n_relations} relations but the graph has "
            f"{kg.n_entities} / {kg.n_relations}")
    triples = kg.split(split)
    if not triples:
        raise ValueError(f"split {split!r} is empty")
    ranks = compute_ranks(params, kg, split, kg_filter, n_workers=n_workers)
    mrr, hits = _metrics(ranks)
    report = EvalReport(split=split, n_queries=len(ranks), mrr=mrr, hits=hits)

    rel_ids = np.fromiter((t.relation for t in triples), dtype=np.int64)
    for rel in np.unique(rel_ids):
        mask = rel_ids == rel
        rel_mrr, rel_hits = _metrics(ranks[mask])
        report.per_relation[int(rel)] = RelationMetrics(
            name=kg.relation_names[rel], count=int(mask.sum()),
            mrr=rel_mrr, hits10=rel_hits[10])

    # Table-style merged view: a raw relation pooled with its reciprocal,
    # i.e. tail and head prediction together.
    n_raw = kg.n_raw_relations
    for raw in np.unique(rel_ids % n_raw):
        mask = (rel_ids % n_raw) == raw
        raw_mrr, raw_hits = _metrics(ranks[mask])
        name = kg.relation_names[raw]
        if name.endswith(RECIPROCAL_SUFFIX):
            name = name[: -len(RECIPROCAL_SUFFIX)]
        report.per_relation_merged[int(raw)] = RelationMetrics(
            name=name, count=int(mask.sum()), mrr=raw_mrr, hits10=raw_hits[10])
    return report


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def report_to_dict(report: EvalReport) -> dict:
    def rel_rows(table):
        return [
            {"id": rel_id, "relation": m.name, "count": m.count,
             "mrr": m.mrr, "hits10": m.hits10}
            for rel_id, m in sorted(table.items())
        ]

    return {
        "split": report.split,
        "n_queries": report.n_queries,
        "mrr": report.mrr,
        "hits": {str(k): v for k, v in sorted(report.hits.items())},
        "per_relation": rel_rows(report.per_relation),
        "per_relation_merged": rel_rows(report.per_relation_merged),
    }


def report_to_json(report: EvalReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True)


def report_to_text(report: EvalReport) -> str:
    lines = [
        f"split {report.split}: {report.n_queries} queries",
        f"  MRR     {report.mrr:.4f}",
    ]
    lines += [f"  Hits@{k:<2} {report.hits[k]:.4f}" for k in sorted(report.hits)]
    if report.per_relation:
        width = max(len(m.name) for m in report.per_relation.values())
        lines.append(f"  {'relation':<{width}}  count     mrr  hits@10")
        for _, m in sorted(report.per_relation.items()):
            lines.append(
                f"  {m.name:<{width}}  {m.count:>5}  {m.mrr:.4f}   {m.hits10:.4f}")
    return "\n".join(lines)


def per_relation_csv(report: EvalReport, merged: bool = True) -> str:
    """CSV rows relation,count,mrr,hits10 (merged raw-relation view by default)."""
    table = report.per_relation_merged if merged else report.per_relation
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["relation", "count", "mrr", "hits10"])
    for _, m in sorted(table.items()):
        writer.writerow([m.name, m.count, f"{m.mrr:.6f}", f"{m.hits10:.6f}"])
    return buffer.getvalue()
