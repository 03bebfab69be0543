"""DIMACS CNF text handling and model decoding.

Serialization is normative: a "p cnf V C" header, then one clause per line
as space-separated literals followed by " 0".  Comment lines ("c ...") are
accepted when parsing and optionally emitted before the header.

scale_dimacs rewrites a single-step binary-optimized careful encoding (the
unmerged, ladder-free form) to an arbitrary length purely textually: the
transition block is replicated with literal offsets and the final-step block
is shifted, avoiding re-encoding.
"""

from __future__ import annotations

from collections.abc import Sequence

from .encoding import CnfFormula, VarMap
from .errors import IntegrityError, ParseError
from .pfa import Word


def write_dimacs(formula: CnfFormula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {formula.num_vars} {len(formula.clauses)}")
    for clause in formula.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = num_clauses = None
    clauses: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise ParseError(f"line {lineno}: duplicate header")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: bad header {line!r}")
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: bad header {line!r}") from exc
            continue
        if num_vars is None:
            raise ParseError(f"line {lineno}: clause before header")
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad literal in {line!r}") from exc
        if not lits or lits[-1] != 0:
            raise ParseError(f"line {lineno}: clause not terminated by 0")
        lits = lits[:-1]
        if not lits:
            raise ParseError(f"line {lineno}: empty clause")
        for lit in lits:
            if lit == 0:
                raise ParseError(f"line {lineno}: embedded 0 in clause")
            if abs(lit) > num_vars:
                raise ParseError(f"line {lineno}: literal {lit} exceeds {num_vars} variables")
        clauses.append(lits)
    if num_vars is None:
        raise ParseError("missing 'p cnf' header")
    if num_clauses != len(clauses):
        raise ParseError(
            f"header promises {num_clauses} clauses, found {len(clauses)}"
        )
    return CnfFormula(num_vars, clauses)


def _shift_line(lits: list[int], offset: int) -> str:
    return " ".join(
        str(lit + offset if lit > 0 else lit - offset) for lit in lits
    ) + " 0"


def scale_dimacs(primary: str, length: int, n: int) -> str:
    """Stretch a length-1 binary-optimized careful encoding to `length`.

    The primary must be the unmerged, ladder-free form for an n-state
    two-letter automaton: 2n+1 variables and 2n + n(n+1)/2 clauses, laid out
    as n initial unit clauses, 2n transition clauses, then n(n-1)/2 final
    pair clauses.  For length 1 the input text is returned unchanged.
    """
    if length < 1:
        raise ParseError(f"target length must be >= 1, got {length}")
    if n < 1:
        raise ParseError(f"state count must be >= 1, got {n}")
    formula = parse_dimacs(primary)
    want_vars = 2 * n + 1
    want_clauses = 2 * n + n * (n + 1) // 2
    if formula.num_vars != want_vars or len(formula.clauses) != want_clauses:
        raise ParseError(
            f"primary is not a single-step binary encoding for n={n}: "
            f"expected {want_vars} variables and {want_clauses} clauses, "
            f"got {formula.num_vars} and {len(formula.clauses)}"
        )
    initial = formula.clauses[:n]
    transition = formula.clauses[n : 3 * n]
    final = formula.clauses[3 * n :]
    for q, clause in enumerate(initial):
        if clause != [q + 1]:
            raise ParseError(f"initial clause {q} is {clause}, expected [{q + 1}]")
    for clause in transition:
        if not 2 <= len(clause) <= 3:
            raise ParseError(f"transition clause {clause} has bad arity")
    for clause in final:
        if len(clause) != 2 or clause[0] > 0 or clause[1] > 0:
            raise ParseError(f"final clause {clause} is not a negative pair")
    if length == 1:
        return primary

    step = n + 1  # variables consumed per additional time step
    lines = [f"p cnf {(length + 1) * n + length} {2 * length * n + n * (n + 1) // 2}"]
    for clause in initial:
        lines.append(_shift_line(clause, 0))
    for t in range(1, length + 1):
        offset = (t - 1) * step
        for clause in transition:
            lines.append(_shift_line(clause, offset))
    for clause in final:
        lines.append(_shift_line(clause, (length - 1) * step))
    return "\n".join(lines) + "\n"


def decode_word(model: Sequence[bool], varmap: VarMap) -> Word:
    """Recover the word from a satisfying assignment's letter variables."""
    word: list[int] = []
    for t in range(1, varmap.length + 1):
        if varmap.binary_opt:
            word.append(0 if model[varmap.x(0, t)] else 1)
            continue
        chosen = [c for c in range(varmap.m) if model[varmap.x(c, t)]]
        if len(chosen) != 1:
            raise IntegrityError(
                f"position {t}: {len(chosen)} letter variables true, expected 1"
            )
        word.append(chosen[0])
    return tuple(word)
