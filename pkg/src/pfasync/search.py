"""Minimum-length synchronizing word search driven by the SAT backend.

The careful search first applies the cyclic-state filter (a cheap sufficient
condition for non-synchronizability of binary PFAs), then probes lengths
1, 2, 4, 8, ... until the first satisfiable encoding and closes in by binary
search.  Binary search is justified only when some letter is total (then a
careful word of length l extends to one of length l+1 by appending that
letter); without a total letter the search falls back to incremental probing,
which needs no monotonicity because each encoding asks for an exact length.

The exact-synchronization search is always incremental: ESW existence is not
monotone in the length (a word of length l may exist while none of length
l+1 does), so the first satisfiable length is the answer and non-existence
is never certified here (that is the oracles' job).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from .dimacs import decode_word
from .encoding import EncodeOptions, encode_csw, encode_esw
from .errors import IntegrityError, InputError
from .pfa import Pfa, Word, cyclic_filter, is_csw, is_esw
from .solver import SolveOutcome, solve_builtin

# Options used when the caller does not choose: fastest for the built-in
# solver on the benchmark families (measured), and satisfiability-preserving.
PIPELINE_OPTIONS = EncodeOptions(merge_parallel=True)


@dataclass(frozen=True)
class SearchBudget:
    max_len: int = 2**14
    max_conflicts: int | None = 10**6  # per solver call
    max_seconds: float | None = None  # per solver call


@dataclass(frozen=True)
class SearchOutcome:
    status: str  # "synchronizing" | "not-synchronizing" | "inconclusive"
    min_len: int | None = None
    witness: Word | None = None
    certificate: str | None = None  # "filter" | "oracle" for not-synchronizing
    trace: tuple[int, ...] = ()  # lengths queried, in order
    max_len_tried: int | None = None  # largest length probed when inconclusive
    wall_s: float = 0.0


@dataclass(frozen=True)
class CheckResult:
    """Outcome of confirming a predicted minimum length."""

    status: str  # "confirmed" | "too-short" | "too-long" | "inconclusive"
    sat_at: str | None  # solver status at the predicted length
    sat_below: str | None  # solver status at predicted-1 (None if not probed)


class _BudgetHit(Exception):
    pass


def doubling_bisect(
    query: Callable[[int], bool], cap: int, trace: list[int]
) -> int | None:
    """Minimum l with query(l) true, assuming upward-monotone truth.

    Doubles 1, 2, 4, ... until the first true answer, then binary-searches
    the enclosed interval.  Every probed length is appended to `trace`.
    Returns None when the cap is passed without a true answer.
    """
    ell = 1
    while ell <= cap:
        trace.append(ell)
        if query(ell):
            break
        ell *= 2
    else:
        return None
    hi = ell
    lo = 0 if ell == 1 else ell // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        trace.append(mid)
        if query(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _trivial_outcome(pfa: Pfa, start: float) -> SearchOutcome | None:
    if pfa.n == 1:
        return SearchOutcome(
            "synchronizing", 0, (), None, (), None, time.perf_counter() - start
        )
    return None


def min_csw(
    pfa: Pfa,
    budget: SearchBudget = SearchBudget(),
    *,
    options: EncodeOptions = PIPELINE_OPTIONS,
    use_filter: bool = True,
    solve_fn: Callable[..., SolveOutcome] | None = None,
    query_fn: Callable[[int], bool] | None = None,
) -> SearchOutcome:
    """Minimum careful synchronizing word length, with witness.

    query_fn replaces the whole encode-and-solve step (used for testing the
    search schedule); with it, no witness is produced.  solve_fn replaces
    just the solver backend.
    """
    start = time.perf_counter()
    trivial = _trivial_outcome(pfa, start)
    if trivial is not None:
        return trivial
    if use_filter and pfa.m == 2 and query_fn is None and cyclic_filter(pfa):
        return SearchOutcome(
            "not-synchronizing",
            certificate="filter",
            wall_s=time.perf_counter() - start,
        )

    trace: list[int] = []
    models: dict[int, tuple] = {}

    if query_fn is None:
        solve = solve_fn if solve_fn is not None else solve_builtin

        def query(length: int) -> bool:
            formula, vm = encode_csw(pfa, length, options)
            outcome = solve(
                formula,
                max_conflicts=budget.max_conflicts,
                max_seconds=budget.max_seconds,
            )
            if outcome.status == "budget":
                raise _BudgetHit
            if outcome.status == "sat":
                models[length] = (outcome.model, vm)
                return True
            return False

    else:
        query = query_fn

    # Appending a total letter extends any careful word, so existence is
    # monotone in the length and binary search applies; otherwise probe
    # lengths one by one (sound regardless, each encoding is exact-length).
    monotone = bool(pfa.total_letters())
    try:
        if monotone:
            best = doubling_bisect(query, budget.max_len, trace)
        else:
            best = None
            for ell in range(1, budget.max_len + 1):
                trace.append(ell)
                if query(ell):
                    best = ell
                    break
    except _BudgetHit:
        return SearchOutcome(
            "inconclusive",
            trace=tuple(trace),
            max_len_tried=max(trace),
            wall_s=time.perf_counter() - start,
        )

    if best is None:
        return SearchOutcome(
            "inconclusive",
            trace=tuple(trace),
            max_len_tried=max(trace) if trace else None,
            wall_s=time.perf_counter() - start,
        )
    witness: Word | None = None
    if query_fn is None:
        model, vm = models[best]
        witness = decode_word(model, vm)
        if not is_csw(pfa, witness):
            raise IntegrityError("decoded word is not carefully synchronizing")
    return SearchOutcome(
        "synchronizing",
        best,
        witness,
        None,
        tuple(trace),
        None,
        time.perf_counter() - start,
    )


def min_esw(
    pfa: Pfa,
    budget: SearchBudget = SearchBudget(),
    *,
    options: EncodeOptions = PIPELINE_OPTIONS,
    solve_fn: Callable[..., SolveOutcome] | None = None,
) -> SearchOutcome:
    """Minimum exactly synchronizing word length, by incremental probing.

    Never reports not-synchronizing: an inconclusive outcome means no word
    up to the length cap, which for exact synchronization proves nothing.
    """
    start = time.perf_counter()
    trivial = _trivial_outcome(pfa, start)
    if trivial is not None:
        return trivial
    solve = solve_fn if solve_fn is not None else solve_builtin
    trace: list[int] = []
    for ell in range(1, budget.max_len + 1):
        formula, vm = encode_esw(pfa, ell, options)
        trace.append(ell)
        outcome = solve(
            formula,
            max_conflicts=budget.max_conflicts,
            max_seconds=budget.max_seconds,
        )
        if outcome.status == "budget":
            break
        if outcome.status == "sat":
            witness = decode_word(outcome.model, vm)
            if not is_esw(pfa, witness):
                raise IntegrityError("decoded word is not exactly synchronizing")
            return SearchOutcome(
                "synchronizing",
                ell,
                witness,
                None,
                tuple(trace),
                None,
                time.perf_counter() - start,
            )
    return SearchOutcome(
        "inconclusive",
        trace=tuple(trace),
        max_len_tried=max(trace) if trace else None,
        wall_s=time.perf_counter() - start,
    )


def check_predicted(
    pfa: Pfa,
    predicted: int,
    mode: str = "csw",
    budget: SearchBudget = SearchBudget(),
    *,
    options: EncodeOptions = PIPELINE_OPTIONS,
    solve_fn: Callable[..., SolveOutcome] | None = None,
) -> CheckResult:
    """Confirm a closed-form minimum length with two solver calls.

    Confirmed means satisfiable at the predicted length and unsatisfiable one
    below (length 0 counts as unsatisfiable whenever the automaton has more
    than one state).  Satisfiable one below means the prediction is too long;
    unsatisfiable at the prediction means it is too short.
    """
    if predicted < 1:
        raise InputError(f"predicted length must be >= 1, got {predicted}")
    if mode not in ("csw", "esw"):
        raise InputError(f"unknown mode {mode!r}")
    encoder = encode_csw if mode == "csw" else encode_esw
    solve = solve_fn if solve_fn is not None else solve_builtin

    def run(length: int) -> str:
        formula, _ = encoder(pfa, length, options)
        return solve(
            formula,
            max_conflicts=budget.max_conflicts,
            max_seconds=budget.max_seconds,
        ).status

    at = run(predicted)
    if at == "budget":
        return CheckResult("inconclusive", "budget", None)
    if at == "unsat":
        return CheckResult("too-short", "unsat", None)
    if predicted == 1:
        below = "unsat" if pfa.n > 1 else "sat"
    else:
        below = run(predicted - 1)
    if below == "budget":
        return CheckResult("inconclusive", "sat", "budget")
    if below == "sat":
        return CheckResult("too-long", "sat", "sat")
    return CheckResult("confirmed", "sat", "unsat")
