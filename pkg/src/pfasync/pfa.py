"""Partial deterministic finite automata and synchronization semantics.

A PFA has states 0..n-1 and letters 0..m-1; the transition table may leave
(state, letter) pairs undefined.  Two notions of applying a word to a state
set coexist:

* careful application: the result is defined only if every step is defined
  at every state currently in the set;
* exact application: states where the next letter is undefined are silently
  dropped (the set may become empty).

A word is carefully synchronizing if its careful application to the full
state set is defined and yields a singleton; it is exactly synchronizing if
its exact application to the full state set is a singleton (in particular,
nonempty).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError, ParseError

Word = tuple[int, ...]

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class _UndefinedResult:
    """Sentinel returned by apply_careful when some step is undefined."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "UNDEFINED"


UNDEFINED = _UndefinedResult()


@dataclass(frozen=True)
class Pfa:
    """Immutable transition table; ``delta[q][c]`` is a state or None."""

    n: int
    m: int
    delta: tuple[tuple[int | None, ...], ...]

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise InputError(f"need n >= 1 and m >= 1, got n={self.n}, m={self.m}")
        if len(self.delta) != self.n:
            raise InputError(f"delta has {len(self.delta)} rows, expected {self.n}")
        for q, row in enumerate(self.delta):
            if len(row) != self.m:
                raise InputError(f"state {q}: row has {len(row)} entries, expected {self.m}")
            for c, target in enumerate(row):
                if target is not None and not (0 <= target < self.n):
                    raise InputError(f"delta[{q}][{c}] = {target} out of range")

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int | None]], m: int | None = None) -> "Pfa":
        n = len(rows)
        if n == 0:
            raise InputError("automaton needs at least one state")
        m = len(rows[0]) if m is None else m
        return Pfa(n, m, tuple(tuple(row) for row in rows))

    def step(self, state: int, letter: int) -> int | None:
        return self.delta[state][letter]

    def is_total_letter(self, letter: int) -> bool:
        self._check_letter(letter)
        return all(row[letter] is not None for row in self.delta)

    def total_letters(self) -> list[int]:
        return [c for c in range(self.m) if self.is_total_letter(c)]

    def is_complete(self) -> bool:
        return all(t is not None for row in self.delta for t in row)

    def density(self) -> int:
        """Number of defined transitions."""
        return sum(1 for row in self.delta for t in row if t is not None)

    def _check_letter(self, letter: int) -> None:
        if not (0 <= letter < self.m):
            raise InputError(f"letter {letter} out of range for alphabet of size {self.m}")

    def _check_state(self, state: int) -> None:
        if not (0 <= state < self.n):
            raise InputError(f"state {state} out of range for {self.n} states")

    # -- serialization ------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        for row in self.delta:
            lines.append(" ".join("-" if t is None else str(t) for t in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "m": self.m, "delta": [list(row) for row in self.delta]}
        )


def parse_text(text: str) -> Pfa:
    """Parse the plain automaton format: a "n m" header, then n rows of m
    entries, each a 0-based target state or "-" for undefined."""
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ParseError("empty automaton file")
    head = lines[0].split()
    if len(head) != 2:
        raise ParseError(f"bad header line {lines[0]!r}, expected 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ParseError(f"bad header line {lines[0]!r}") from exc
    if len(lines) != n + 1:
        raise ParseError(f"expected {n} transition rows, found {len(lines) - 1}")
    rows: list[tuple[int | None, ...]] = []
    for q, line in enumerate(lines[1:]):
        cells = line.split()
        if len(cells) != m:
            raise ParseError(f"state {q}: expected {m} entries, found {len(cells)}")
        row: list[int | None] = []
        for cell in cells:
            if cell == "-":
                row.append(None)
            else:
                try:
                    row.append(int(cell))
                except ValueError as exc:
                    raise ParseError(f"state {q}: bad entry {cell!r}") from exc
        rows.append(tuple(row))
    try:
        return Pfa(n, m, tuple(rows))
    except InputError as exc:
        raise ParseError(str(exc)) from exc


def parse_json(text: str) -> Pfa:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON automaton: {exc}") from exc
    try:
        n, m, delta = obj["n"], obj["m"], obj["delta"]
    except (TypeError, KeyError) as exc:
        raise ParseError("JSON automaton needs keys n, m, delta") from exc
    try:
        return Pfa(int(n), int(m), tuple(tuple(row) for row in delta))
    except (InputError, TypeError, ValueError) as exc:
        raise ParseError(f"bad JSON automaton: {exc}") from exc


def parse_auto(text: str) -> Pfa:
    """Dispatch between the JSON mirror and the plain text format."""
    if text.lstrip().startswith("{"):
        return parse_json(text)
    return parse_text(text)


# -- word application -------------------------------------------------------


def _as_word(word: Iterable[int], m: int) -> Word:
    w = tuple(word)
    for c in w:
        if not (0 <= c < m):
            raise InputError(f"letter {c} out of range for alphabet of size {m}")
    return w


def apply_careful(pfa: Pfa, states: Iterable[int], word: Iterable[int]):
    """Image of a state set under careful application, or UNDEFINED.

    The word is applied left to right; as soon as some letter is undefined at
    some currently active state the result is UNDEFINED.
    """
    current = frozenset(states)
    for q in current:
        pfa._check_state(q)
    for c in _as_word(word, pfa.m):
        nxt = set()
        for q in current:
            t = pfa.delta[q][c]
            if t is None:
                return UNDEFINED
            nxt.add(t)
        current = frozenset(nxt)
    return current


def apply_exact(pfa: Pfa, states: Iterable[int], word: Iterable[int]) -> frozenset[int]:
    """Image of a state set under exact application (undefined states drop out)."""
    current = frozenset(states)
    for q in current:
        pfa._check_state(q)
    for c in _as_word(word, pfa.m):
        current = frozenset(
            t for t in (pfa.delta[q][c] for q in current) if t is not None
        )
    return current


def is_csw(pfa: Pfa, word: Iterable[int]) -> bool:
    """Is the word carefully synchronizing (defined everywhere, singleton image)?"""
    image = apply_careful(pfa, range(pfa.n), word)
    return image is not UNDEFINED and len(image) == 1


def is_esw(pfa: Pfa, word: Iterable[int]) -> bool:
    """Is the word exactly synchronizing (exact image of Q a nonempty singleton)?"""
    return len(apply_exact(pfa, range(pfa.n), word)) == 1


# -- cyclic-state filter ----------------------------------------------------


def a_cyclic_states(pfa: Pfa, letter: int) -> frozenset[int]:
    """States lying on a cycle of the letter's functional graph.

    The letter must be total: cyclic states are those q with q = q.a^k for
    some k >= 1, which is exactly the set of states on cycles of the map.
    """
    pfa._check_letter(letter)
    if not pfa.is_total_letter(letter):
        raise InputError(f"letter {letter} is not total; cyclic states are undefined")
    # Functional-graph coloring: follow the chain from each unvisited state;
    # a state revisited within the current walk starts a cycle.
    color = [0] * pfa.n  # 0 new, 1 on current walk, 2 finished
    position: dict[int, int] = {}
    cyclic: set[int] = set()
    for start in range(pfa.n):
        if color[start] != 0:
            continue
        walk: list[int] = []
        q = start
        while color[q] == 0:
            color[q] = 1
            position[q] = len(walk)
            walk.append(q)
            q = pfa.delta[q][letter]  # type: ignore[assignment]
        if color[q] == 1:
            cyclic.update(walk[position[q]:])
        for v in walk:
            color[v] = 2
        position.clear()
    return frozenset(cyclic)


def cyclic_filter(pfa: Pfa) -> bool:
    """Sufficient condition for a binary PFA to be not carefully synchronizing.

    Fires when some total letter has at least two cyclic states and the other
    letter is undefined at one of them.  Sound but not complete.
    """
    if pfa.m != 2:
        raise InputError("cyclic_filter is defined for binary PFAs only")
    for letter in (0, 1):
        if not pfa.is_total_letter(letter):
            continue
        cyc = a_cyclic_states(pfa, letter)
        if len(cyc) < 2:
            continue
        other = 1 - letter
        if any(pfa.delta[q][other] is None for q in cyc):
            return True
    return False


def word_to_str(word: Iterable[int]) -> str:
    """Render letter indices as a, b, c, ... (falls back to dotted indices)."""
    w = tuple(word)
    if all(0 <= c < len(_LETTERS) for c in w):
        return "".join(_LETTERS[c] for c in w)
    return ".".join(str(c) for c in w)


def str_to_word(text: str) -> Word:
    """Inverse of word_to_str for the alphabetic rendering."""
    out = []
    for ch in text:
        idx = _LETTERS.find(ch)
        if idx < 0:
            raise InputError(f"bad letter {ch!r} in word {text!r}")
        out.append(idx)
    return tuple(out)
