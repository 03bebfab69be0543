"""Exhaustive breadth-first oracles over subset spaces.

These are the reference algorithms the SAT pipeline is validated against.
Subsets are bitmasks, so both searches are capped at a configurable number
of states (default 22) to bound memory.

* power_bfs_csw walks the partial power automaton: a letter is applicable to
  a subset only if it is defined at every member.  Reaching a singleton from
  the full state set proves careful synchronizability and, being BFS, yields
  a shortest carefully synchronizing word.
* subset_bfs_esw walks subsets under exact application (members with an
  undefined transition drop out); the empty subset is discarded.  Reaching a
  singleton proves exact synchronizability with a shortest witness.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import IntegrityError, ResourceError
from .pfa import Pfa, Word, is_csw, is_esw

DEFAULT_STATE_CAP = 22


@dataclass(frozen=True)
class SubsetSearchResult:
    found: bool
    min_len: int | None
    witness: Word | None
    explored: int  # number of subsets popped from the queue


def _letter_tables(pfa: Pfa) -> tuple[list[int], list[list[int]]]:
    """Per-letter defined-state masks and per-state image bits."""
    defined = [0] * pfa.m
    image = [[0] * pfa.n for _ in range(pfa.m)]
    for c in range(pfa.m):
        for q in range(pfa.n):
            t = pfa.delta[q][c]
            if t is not None:
                defined[c] |= 1 << q
                image[c][q] = 1 << t
    return defined, image


def _reconstruct(parent: dict[int, tuple[int, int] | None], last: int) -> Word:
    word: list[int] = []
    cur = last
    while parent[cur] is not None:
        cur, letter = parent[cur]  # type: ignore[misc]
        word.append(letter)
    word.reverse()
    return tuple(word)


def _bfs(pfa: Pfa, exact: bool, cap: int) -> SubsetSearchResult:
    if pfa.n > cap:
        raise ResourceError(
            f"exhaustive subset search capped at {cap} states, automaton has {pfa.n}"
        )
    defined, image = _letter_tables(pfa)
    full = (1 << pfa.n) - 1
    parent: dict[int, tuple[int, int] | None] = {full: None}
    queue: deque[int] = deque([full])
    explored = 0
    while queue:
        subset = queue.popleft()
        explored += 1
        if subset & (subset - 1) == 0:
            word = _reconstruct(parent, subset)
            checker = is_esw if exact else is_csw
            if not checker(pfa, word):  # pragma: no cover - internal consistency
                raise IntegrityError("oracle produced an invalid witness")
            return SubsetSearchResult(True, len(word), word, explored)
        for c in range(pfa.m):
            if exact:
                active = subset & defined[c]
                if active == 0:
                    continue  # exact image would be empty
            else:
                if subset & defined[c] != subset:
                    continue  # letter undefined at some member
                active = subset
            nxt = 0
            bits = active
            while bits:
                low = bits & -bits
                nxt |= image[c][low.bit_length() - 1]
                bits ^= low
            if nxt not in parent:
                parent[nxt] = (subset, c)
                queue.append(nxt)
    return SubsetSearchResult(False, None, None, explored)


def power_bfs_csw(pfa: Pfa, cap: int = DEFAULT_STATE_CAP) -> SubsetSearchResult:
    """Shortest carefully synchronizing word via the partial power automaton."""
    return _bfs(pfa, exact=False, cap=cap)


def subset_bfs_esw(pfa: Pfa, cap: int = DEFAULT_STATE_CAP) -> SubsetSearchResult:
    """Shortest exactly synchronizing word via subset search under exact application."""
    return _bfs(pfa, exact=True, cap=cap)
