"""Candidate ranking: alignment score first, caption similarity as tie-break."""

from __future__ import annotations

from ..errors import EmptyListError


def rank_candidates(candidates) -> int:
    """Index of the winning candidate.

    The winner has the maximal alignment (dsg) score; ties fall back to
    the maximal caption-similarity score, remaining ties to the lowest
    candidate index. The result depends only on candidate attributes,
    never on list order.
    """
    if not candidates:
        raise EmptyListError("cannot rank an empty candidate list")
    best = max(candidates, key=lambda c: (c.dsg_score, c.blip_bleu, -c.index))
    return best.index
