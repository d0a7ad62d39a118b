"""Small generated graphs for end-to-end runs and experiments.

The main generator builds a 50-entity graph mixing the two relation
families the model must handle at once: a symmetric pairing relation and
a three-level parent/child hierarchy.  Redundancy is built in (paired
parents share their children, symmetric edges exist in both directions)
so that a held-out edge is inferable from the training remainder.
"""

from __future__ import annotations

import numpy as np

NameTriple = tuple[str, str, str]

SYMMETRIC_RELATION = "pairs_with"
HIERARCHY_RELATION = "parent_of"


def tiny_symmetric_graph(n_pairs: int = 4) -> list[NameTriple]:
    """2*n_pairs entities, one symmetric relation, both directions present."""
    triples = []
    for i in range(n_pairs):
        a, b = f"ent{2 * i:02d}", f"ent{2 * i + 1:02d}"
        triples.append((a, SYMMETRIC_RELATION, b))
        triples.append((b, SYMMETRIC_RELATION, a))
    return triples


def _toy_triples() -> tuple[list[NameTriple], dict[NameTriple, NameTriple]]:
    """The full 50-entity graph plus each triple's redundancy twin.

    The twin of a symmetric edge is its reversal; the twin of a parent
    edge is the same child under the paired parent.  Holding out a triple
    is safe exactly when its twin stays in training.
    """
    roots = [f"root{i}" for i in range(2)]
    mids = [f"mid{i}" for i in range(8)]
    leaves = [f"leaf{i:02d}" for i in range(24)]
    solos = [f"solo{i:02d}" for i in range(16)]

    triples: list[NameTriple] = []
    twin: dict[NameTriple, NameTriple] = {}

    def add_pair(t1: NameTriple, t2: NameTriple):
        triples.extend([t1, t2])
        twin[t1] = t2
        twin[t2] = t1

    # Both roots parent every mid; each mid pair parents the same leaves.
    for mid in mids:
        add_pair((roots[0], HIERARCHY_RELATION, mid),
                 (roots[1], HIERARCHY_RELATION, mid))
    for pair_idx in range(4):
        p1, p2 = mids[2 * pair_idx], mids[2 * pair_idx + 1]
        for leaf in leaves[6 * pair_idx:6 * (pair_idx + 1)]:
            add_pair((p1, HIERARCHY_RELATION, leaf),
                     (p2, HIERARCHY_RELATION, leaf))

    # Symmetric partners among leaves and among the standalone entities.
    partners = [(leaves[i], leaves[i + 1]) for i in range(0, 24, 2)]
    partners += [(solos[i], solos[i + 1]) for i in range(0, 16, 2)]
    for a, b in partners:
        add_pair((a, SYMMETRIC_RELATION, b), (b, SYMMETRIC_RELATION, a))

    return triples, twin


def toy_graph(seed: int = 0, test_fraction: float = 0.1
              ) -> tuple[list[NameTriple], list[NameTriple]]:
    """Deterministic train/test split of the 50-entity toy graph.

    A triple may be held out only while its twin stays in train and both
    of its entities keep at least one other training occurrence.
    """
    triples, twin = _toy_triples()
    rng = np.random.default_rng(seed)
    target = round(len(triples) * test_fraction)

    occurrences: dict[str, int] = {}
    for head, _, tail in triples:
        occurrences[head] = occurrences.get(head, 0) + 1
        occurrences[tail] = occurrences.get(tail, 0) + 1

    test_set: set[NameTriple] = set()
    for idx in rng.permutation(len(triples)):
        if len(test_set) >= target:
            break
        candidate = triples[int(idx)]
        head, _, tail = candidate
        if twin[candidate] in test_set:
            continue
        if occurrences[head] <= 1 or occurrences[tail] <= 1:
            continue
        test_set.add(candidate)
        occurrences[head] -= 1
        occurrences[tail] -= 1

    train = [t for t in triples if t not in test_set]
    test = [t for t in triples if t in test_set]
    return train, test
