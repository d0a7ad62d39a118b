"""Triple-file ingestion, dictionaries, reciprocal augmentation, filtering.

Input files are UTF-8 TSV, one ``head<TAB>relation<TAB>tail`` triple per
line (LF or CRLF endings; blank lines skipped).  Building a graph assigns
integer ids by first appearance over train, then valid, then test, and
appends an inverse triple (t, r_inverse, h) for every raw triple to its
own split, doubling the relation count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .exceptions import ParseError

#: Suffix appended to a relation's name for its inverse twin in reports.
RECIPROCAL_SUFFIX = "_reciprocal"


class Triple(NamedTuple):
    head: int
    relation: int
    tail: int


@dataclass
class KnowledgeGraph:
    """Id-encoded splits plus the name dictionaries.

    ``n_relations`` counts the reciprocal relations, so it is twice the
    number of distinct relation names in the input files; relation id
    ``r + n_raw_relations`` is the inverse of raw relation ``r``.
    """

    entity_names: list[str]
    relation_names: list[str]
    train: list[Triple]
    valid: list[Triple]
    test: list[Triple]
    n_raw_relations: int

    @property
    def n_entities(self) -> int:
        return len(self.entity_names)

    @property
    def n_relations(self) -> int:
        return len(self.relation_names)

    def split(self, name: str) -> list[Triple]:
        try:
            return {"train": self.train, "valid": self.valid,
                    "test": self.test}[name]
        except KeyError:
            raise ValueError(f"unknown split {name!r}") from None


def load_split(path) -> list[tuple[str, str, str]]:
    """Read one TSV triple file into (head, relation, tail) name tuples."""
    triples = []
    with open(path, encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ParseError(path, line_number,
                                 f"expected 3 tab-separated fields, got {len(fields)}")
            triples.append((fields[0], fields[1], fields[2]))
    return triples


def write_split(path, triples) -> None:
    """Write (head, relation, tail) name tuples as a TSV split file."""
    with open(path, "w", encoding="utf-8") as handle:
        for head, rel, tail in triples:
            handle.write(f"{head}\t{rel}\t{tail}\n")


def build_graph(train, valid=(), test=()) -> KnowledgeGraph:
    """Assign ids over the union of splits and add reciprocal triples.

    Duplicate triples are kept as-is (they re-weight training examples).
    Ids follow first appearance in train, then valid, then test, so the
    same files always produce the same encoding.
    """
    entity_ids: dict[str, int] = {}
    relation_ids: dict[str, int] = {}

    def encode(split) -> list[tuple[int, int, int]]:
        encoded = []
        for head, rel, tail in split:
            h = entity_ids.setdefault(head, len(entity_ids))
            r = relation_ids.setdefault(rel, len(relation_ids))
            t = entity_ids.setdefault(tail, len(entity_ids))
            encoded.append((h, r, t))
        return encoded

    raw_splits = [encode(split) for split in (train, valid, test)]
    n_raw = len(relation_ids)

    def augment(encoded) -> list[Triple]:
        out = [Triple(h, r, t) for h, r, t in encoded]
        out.extend(Triple(t, r + n_raw, h) for h, r, t in encoded)
        return out

    relation_names = list(relation_ids)
    relation_names += [name + RECIPROCAL_SUFFIX for name in relation_names]
    return KnowledgeGraph(
        entity_names=list(entity_ids),
        relation_names=relation_names,
        train=augment(raw_splits[0]),
        valid=augment(raw_splits[1]),
        test=augment(raw_splits[2]),
        n_raw_relations=n_raw,
    )


#: (head, relation) -> set of every tail known true in any split.
FilterIndex = dict[tuple[int, int], set[int]]


def build_filter(kg: KnowledgeGraph) -> FilterIndex:
    """Index of known-true tails over train, valid and test together."""
    index: FilterIndex = {}
    for split in (kg.train, kg.valid, kg.test):
        for head, rel, tail in split:
            index.setdefault((head, rel), set()).add(tail)
    return index
