"""CNF encodings of bounded synchronization questions.

encode_csw(A, l) is satisfiable iff A has a carefully synchronizing word of
length exactly l; encode_esw(A, l) likewise for exactly synchronizing words.

Variable numbering interleaves letter and state variables by time step so
that a single-step binary encoding can be rescaled to any length by shifting
absolute values (see dimacs.scale_dimacs):

    y(q, t) = (q+1) + t*(n + w)          t = 0..l, q = 0..n-1
    x(c, t) = n + (c+1) + (t-1)*(n + w)  t = 1..l, c = 0..w-1

where w is the number of letter variables per position: m normally, 1 under
the binary-alphabet optimization (x true <=> the position holds letter 0).
Auxiliary ladder variables, when requested, are appended after all of these.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InputError
from .pfa import Pfa

Clause = list[int]


@dataclass(frozen=True)
class EncodeOptions:
    """Encoding variants; all combinations preserve satisfiability.

    ladder        -- encode the final-step at-most-one-state group with the
                     ladder construction (4n-4 clauses, n-1 fresh variables)
                     instead of the n(n-1)/2 pairwise clauses.
    binary_opt    -- for two-letter automata, use one letter variable per
                     position (positive = letter 0) and drop the letter
                     cardinality clauses, which become tautological.
    ladder_letters-- apply the ladder to the per-position letter groups too.
    merge_parallel-- where every letter maps state q to the same target k,
                     emit the single clause (-y(q,t-1) v y(k,t)) instead of
                     one clause per letter.  Changes clause counts, so it is
                     off by default; the length-search pipeline turns it on.
    """

    ladder: bool = False
    binary_opt: bool = False
    ladder_letters: bool = False
    merge_parallel: bool = False


@dataclass
class CnfFormula:
    num_vars: int
    clauses: list[Clause] = field(default_factory=list)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def validate(self) -> None:
        for clause in self.clauses:
            if not clause:
                raise InputError("empty clause")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise InputError(f"literal {lit} out of range 1..{self.num_vars}")


@dataclass(frozen=True)
class VarMap:
    """Mapping between (state, step) / (letter, step) pairs and DIMACS variables."""

    n: int
    m: int
    length: int
    binary_opt: bool = False

    @property
    def letter_width(self) -> int:
        return 1 if self.binary_opt else self.m

    @property
    def num_base_vars(self) -> int:
        return self.n * (self.length + 1) + self.letter_width * self.length

    def y(self, state: int, t: int) -> int:
        if not (0 <= state < self.n and 0 <= t <= self.length):
            raise InputError(f"y({state},{t}) out of range")
        return (state + 1) + t * (self.n + self.letter_width)

    def x(self, slot: int, t: int) -> int:
        if not (0 <= slot < self.letter_width and 1 <= t <= self.length):
            raise InputError(f"x({slot},{t}) out of range")
        return self.n + (slot + 1) + (t - 1) * (self.n + self.letter_width)

    def letter_lit(self, letter: int, t: int) -> int:
        """Literal that is true iff position t (1-based) holds the letter."""
        if not (0 <= letter < self.m):
            raise InputError(f"letter {letter} out of range")
        if self.binary_opt:
            var = self.x(0, t)
            return var if letter == 0 else -var
        return self.x(letter, t)


def ladder_amo(variables: list[int], aux_base: int) -> list[Clause]:
    """Ladder replacement for pairwise at-most-one over the given variables.

    Uses fresh variables aux_base+1 .. aux_base+k-1 for k inputs and emits
    exactly 4k-4 clauses: a monotone chain f_{j+1} -> f_j plus channelling
    y_j <-> (f_{j-1} and not f_j), simplified at the ends as if f_0 were true
    and f_k false.  Any assignment with two inputs true is excluded; exactly
    one input true extends to the fresh variables.  The all-false assignment
    does not extend (the chain must step somewhere), so in isolation this is
    an exactly-one constraint; every use site already forces at least one
    input, keeping satisfiability unchanged.
    """
    k = len(variables)
    if k < 2:
        raise InputError("ladder needs at least two variables")

    def f(j: int) -> int:
        return aux_base + j

    clauses: list[Clause] = []
    for j in range(1, k - 1):
        clauses.append([-f(j + 1), f(j)])
    for j in range(1, k + 1):
        yj = variables[j - 1]
        if j == 1:
            clauses.append([f(1), yj])
        elif j == k:
            clauses.append([-f(k - 1), yj])
        else:
            clauses.append([-f(j - 1), f(j), yj])
        if j > 1:
            clauses.append([-yj, f(j - 1)])
        if j < k:
            clauses.append([-yj, -f(j)])
    return clauses


def _check_args(pfa: Pfa, length: int, options: EncodeOptions) -> None:
    if length < 1:
        raise InputError(f"encoding length must be >= 1, got {length}")
    if options.binary_opt and pfa.m != 2:
        raise InputError("binary_opt requires a two-letter alphabet")


def _merged_states(pfa: Pfa, options: EncodeOptions) -> set[int]:
    """States where all letters are defined with one common target."""
    if not options.merge_parallel:
        return set()
    merged = set()
    for q in range(pfa.n):
        targets = {pfa.delta[q][c] for c in range(pfa.m)}
        if None not in targets and len(targets) == 1:
            merged.add(q)
    return merged


def _letter_group(
    pfa: Pfa, vm: VarMap, options: EncodeOptions, clauses: list[Clause], aux: int
) -> int:
    """Exactly-one-letter clauses per position; dropped under binary_opt."""
    if options.binary_opt:
        return aux
    for t in range(1, vm.length + 1):
        xs = [vm.x(c, t) for c in range(pfa.m)]
        clauses.append(list(xs))
        if options.ladder_letters and pfa.m >= 2:
            clauses.extend(ladder_amo(xs, aux))
            aux += pfa.m - 1
        else:
            for r in range(pfa.m):
                for s in range(r + 1, pfa.m):
                    clauses.append([-xs[r], -xs[s]])
    return aux


def _final_amo(
    pfa: Pfa, vm: VarMap, options: EncodeOptions, clauses: list[Clause], aux: int
) -> int:
    ys = [vm.y(q, vm.length) for q in range(pfa.n)]
    if options.ladder and pfa.n >= 2:
        clauses.extend(ladder_amo(ys, aux))
        aux += pfa.n - 1
    else:
        for r in range(pfa.n):
            for s in range(r + 1, pfa.n):
                clauses.append([-ys[r], -ys[s]])
    return aux


def encode_csw(
    pfa: Pfa, length: int, options: EncodeOptions = EncodeOptions()
) -> tuple[CnfFormula, VarMap]:
    """CNF satisfiable iff the automaton has a CSW of length exactly `length`.

    Clause groups in emission order: initial step (all states active), letter
    cardinality, transitions (letter-major per step, with an undefinedness
    clause where a transition is missing), final-step at-most-one.
    """
    _check_args(pfa, length, options)
    vm = VarMap(pfa.n, pfa.m, length, options.binary_opt)
    clauses: list[Clause] = []
    aux = vm.num_base_vars

    for q in range(pfa.n):
        clauses.append([vm.y(q, 0)])

    aux = _letter_group(pfa, vm, options, clauses, aux)

    merged = _merged_states(pfa, options)
    for t in range(1, length + 1):
        for c in range(pfa.m):
            for q in range(pfa.n):
                if q in merged:
                    if c == 0:
                        clauses.append([-vm.y(q, t - 1), vm.y(pfa.delta[q][0], t)])
                    continue
                target = pfa.delta[q][c]
                lit = vm.letter_lit(c, t)
                if target is None:
                    clauses.append([-vm.y(q, t - 1), -lit])
                else:
                    clauses.append([-vm.y(q, t - 1), -lit, vm.y(target, t)])

    aux = _final_amo(pfa, vm, options, clauses, aux)
    return CnfFormula(aux, clauses), vm


def encode_esw(
    pfa: Pfa, length: int, options: EncodeOptions = EncodeOptions()
) -> tuple[CnfFormula, VarMap]:
    """CNF satisfiable iff the automaton has an ESW of length exactly `length`.

    Active-state variables are pinned to the exact image of the full state
    set: forward clauses make the image a lower bound, backward clauses (a
    state is active only if some predecessor under the chosen letter was) an
    upper bound.  The final step then requires exactly one active state.
    There is no undefinedness clause: states drop out instead.
    """
    _check_args(pfa, length, options)
    vm = VarMap(pfa.n, pfa.m, length, options.binary_opt)
    clauses: list[Clause] = []
    aux = vm.num_base_vars

    for q in range(pfa.n):
        clauses.append([vm.y(q, 0)])

    aux = _letter_group(pfa, vm, options, clauses, aux)

    merged = _merged_states(pfa, options)
    for t in range(1, length + 1):
        for c in range(pfa.m):
            for q in range(pfa.n):
                if q in merged:
                    if c == 0:
                        clauses.append([-vm.y(q, t - 1), vm.y(pfa.delta[q][0], t)])
                    continue
                target = pfa.delta[q][c]
                if target is not None:
                    clauses.append(
                        [-vm.y(q, t - 1), -vm.letter_lit(c, t), vm.y(target, t)]
                    )

    for t in range(1, length + 1):
        for k in range(pfa.n):
            for c in range(pfa.m):
                clause = [-vm.y(k, t), -vm.letter_lit(c, t)]
                clause.extend(
                    vm.y(q, t - 1) for q in range(pfa.n) if pfa.delta[q][c] == k
                )
                clauses.append(clause)

    aux = _final_amo(pfa, vm, options, clauses, aux)
    clauses.append([vm.y(q, length) for q in range(pfa.n)])
    return CnfFormula(aux, clauses), vm


def encode(
    pfa: Pfa, length: int, mode: str, options: EncodeOptions = EncodeOptions()
) -> tuple[CnfFormula, VarMap]:
    if mode == "csw":
        return encode_csw(pfa, length, options)
    if mode == "esw":
        return encode_esw(pfa, length, options)
    raise InputError(f"unknown mode {mode!r}, expected 'csw' or 'esw'")
