"""SAT solving backends.

solve_builtin is a self-contained CDCL solver: two-watched-literal
propagation, first-UIP clause learning with basic minimization, VSIDS-style
activities with phase saving, geometric restarts, and occasional deletion of
unhelpful learned clauses.  No preprocessing.  Runs are deterministic for a
fixed seed (the seed only perturbs initial variable activities).

solve_external shells out to `solver file.cnf` and parses a SAT/UNSAT
verdict plus a model line of literals.  Models from either backend are
verified against the formula before being reported; a model that fails
verification raises IntegrityError rather than returning a wrong answer.
"""

from __future__ import annotations

import os
import random
import subprocess
import tempfile
import time
from dataclasses import dataclass
from heapq import heapify, heappop, heappush

from .dimacs import write_dimacs
from .encoding import CnfFormula
from .errors import ConfigError, IntegrityError, ParseError

_RESTART_FIRST = 100
_RESTART_FACTOR = 1.5
_VAR_DECAY = 1 / 0.95
_ACT_RESCALE = 1e100


@dataclass(frozen=True)
class SolveStats:
    decisions: int
    propagations: int
    conflicts: int
    restarts: int
    wall_s: float


@dataclass(frozen=True)
class SolveOutcome:
    status: str  # "sat" | "unsat" | "budget"
    model: tuple[bool, ...] | None  # indexed by variable; model[0] is unused
    stats: SolveStats


def check_model(formula: CnfFormula, model: tuple[bool, ...] | list[bool]) -> bool:
    """Does the assignment satisfy every clause?"""
    for clause in formula.clauses:
        if not any(model[lit] if lit > 0 else not model[-lit] for lit in clause):
            return False
    return True


class _Budget:
    __slots__ = ("max_conflicts", "deadline")

    def __init__(self, max_conflicts: int | None, max_seconds: float | None):
        self.max_conflicts = max_conflicts
        self.deadline = None if max_seconds is None else time.perf_counter() + max_seconds


class _Cdcl:
    def __init__(self, formula: CnfFormula, seed: int):
        self.nvars = formula.num_vars
        V = self.nvars
        self.val = bytearray(2 * V + 1)  # index lit+V: 0 unknown, 1 true, 2 false
        self.watches: list[list[list[int]]] = [[] for _ in range(2 * V + 1)]
        self.level = [0] * (V + 1)
        self.reason: list[list[int] | None] = [None] * (V + 1)
        self.phase = bytearray(V + 1)  # saved polarity, 0 = assign false first
        self.seen = bytearray(V + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.dlevel = 0
        rng = random.Random(seed)
        self.activity = [0.0] + [rng.random() * 1e-6 for _ in range(V)]
        self.var_inc = 1.0
        self.heap = [(-self.activity[v], v) for v in range(1, V + 1)]
        heapify(self.heap)
        self.learnts: list[tuple[list[int], int]] = []  # (clause, lbd)
        self.max_learnts = 4000 + len(formula.clauses) // 2
        self.decisions = 0
        self.propagations = 0
        self.conflicts = 0
        self.restarts = 0
        self.unsat = False
        self.clauses: list[list[int]] = []
        units: list[int] = []
        for clause in formula.clauses:
            unique = set(clause)
            if any(-lit in unique for lit in unique):
                continue  # tautology, satisfied by anything
            deduped = sorted(unique, key=abs)
            if not deduped:
                self.unsat = True
                return
            if len(deduped) == 1:
                units.append(deduped[0])
            else:
                self.clauses.append(deduped)
                self.watches[deduped[0] + V].append(deduped)
                self.watches[deduped[1] + V].append(deduped)
        # Watches were attached with nothing assigned, so enqueueing the unit
        # clauses afterwards keeps the two-watch invariant intact.
        for lit in units:
            state = self.val[lit + V]
            if state == 2:
                self.unsat = True
                return
            if state == 0:
                self._assign(lit, None)

    # -- assignment ---------------------------------------------------------

    def _assign(self, lit: int, reason: list[int] | None) -> None:
        V = self.nvars
        self.val[lit + V] = 1
        self.val[V - lit] = 2
        v = lit if lit > 0 else -lit
        self.level[v] = self.dlevel
        self.reason[v] = reason
        self.trail.append(lit)

    def _backtrack(self, target: int) -> None:
        if self.dlevel <= target:
            return
        lim = self.trail_lim[target]
        V = self.nvars
        val, trail = self.val, self.trail
        act, heap = self.activity, self.heap
        for i in range(len(trail) - 1, lim - 1, -1):
            lit = trail[i]
            v = lit if lit > 0 else -lit
            self.phase[v] = 1 if lit > 0 else 0
            val[lit + V] = 0
            val[V - lit] = 0
            self.reason[v] = None
            heappush(heap, (-act[v], v))
        del trail[lim:]
        del self.trail_lim[target:]
        self.qhead = lim
        self.dlevel = target

    # -- propagation --------------------------------------------------------

    def _propagate(self) -> list[int] | None:
        V = self.nvars
        val = self.val
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            lit = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            neg = -lit
            ws = watches[neg + V]
            i = j = 0
            n_ws = len(ws)
            while i < n_ws:
                c = ws[i]
                i += 1
                if c[0] == neg:
                    c[0] = c[1]
                    c[1] = neg
                first = c[0]
                if val[first + V] == 1:
                    ws[j] = c
                    j += 1
                    continue
                moved = False
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk + V] != 2:
                        c[1] = lk
                        c[k] = neg
                        watches[lk + V].append(c)
                        moved = True
                        break
                if moved:
                    continue
                ws[j] = c
                j += 1
                if val[first + V] == 2:
                    while i < n_ws:  # conflict: keep the remaining watchers
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    return c
                self.val[first + V] = 1
                self.val[V - first] = 2
                v = first if first > 0 else -first
                self.level[v] = self.dlevel
                self.reason[v] = c
                trail.append(first)
            del ws[j:]
        return None

    # -- conflict analysis --------------------------------------------------

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > _ACT_RESCALE:
            for i in range(1, self.nvars + 1):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[v2], v2) for v2 in range(1, self.nvars + 1)
                         if self.val[v2 + self.nvars] == 0]
            heapify(self.heap)

    def _analyze(self, confl: list[int]) -> tuple[list[int], int, int]:
        """First-UIP learned clause, backjump level, and clause LBD."""
        seen = self.seen
        level = self.level
        trail = self.trail
        dlevel = self.dlevel
        learnt = [0]
        path = 0
        p = 0
        idx = len(trail)
        while True:
            for i in range(0 if p == 0 else 1, len(confl)):
                q = confl[i]
                v = q if q > 0 else -q
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    self._bump(v)
                    if level[v] >= dlevel:
                        path += 1
                    else:
                        learnt.append(q)
            while True:
                idx -= 1
                p = trail[idx]
                v = p if p > 0 else -p
                if seen[v]:
                    break
            path -= 1
            seen[v] = 0
            if path == 0:
                learnt[0] = -p
                break
            confl = self.reason[v]  # type: ignore[assignment]

        out = [learnt[0]]
        for q in learnt[1:]:  # drop literals implied by the rest of the clause
            r = self.reason[q if q > 0 else -q]
            if r is None:
                out.append(q)
                continue
            for i in range(1, len(r)):
                ov = r[i] if r[i] > 0 else -r[i]
                if not seen[ov] and level[ov] > 0:
                    out.append(q)
                    break
        for q in learnt[1:]:
            seen[q if q > 0 else -q] = 0

        if len(out) == 1:
            bt = 0
        else:
            mi = 1
            for i in range(2, len(out)):
                if level[abs(out[i])] > level[abs(out[mi])]:
                    mi = i
            out[1], out[mi] = out[mi], out[1]
            bt = level[abs(out[1])]
        lbd = len({level[q if q > 0 else -q] for q in out})
        return out, bt, lbd

    # -- learned clause management ------------------------------------------

    def _reduce_db(self) -> None:
        keep: list[tuple[list[int], int]] = []
        candidates: list[tuple[list[int], int]] = []
        for c, lbd in self.learnts:
            v0 = c[0] if c[0] > 0 else -c[0]
            if lbd <= 2 or self.reason[v0] is c:
                keep.append((c, lbd))
            else:
                candidates.append((c, lbd))
        candidates.sort(key=lambda cl: (cl[1], len(cl[0])))
        keep.extend(candidates[: len(candidates) // 2])
        self.learnts = keep
        V = self.nvars
        self.watches = [[] for _ in range(2 * V + 1)]
        for c in self.clauses:
            self.watches[c[0] + V].append(c)
            self.watches[c[1] + V].append(c)
        for c, _ in self.learnts:
            self.watches[c[0] + V].append(c)
            self.watches[c[1] + V].append(c)
        self.max_learnts = int(self.max_learnts * 1.4)

    # -- main loop ----------------------------------------------------------

    def solve(self, budget: _Budget) -> str:
        if self.unsat:
            return "unsat"
        if self._propagate() is not None:
            return "unsat"
        restart_limit = _RESTART_FIRST
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                since_restart += 1
                if self.dlevel == 0:
                    return "unsat"
                learnt, bt, lbd = self._analyze(confl)
                self._backtrack(bt)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    V = self.nvars
                    self.watches[learnt[0] + V].append(learnt)
                    self.watches[learnt[1] + V].append(learnt)
                    self.learnts.append((learnt, lbd))
                    self._assign(learnt[0], learnt)
                self.var_inc *= _VAR_DECAY
                if budget.max_conflicts is not None and self.conflicts >= budget.max_conflicts:
                    return "budget"
                if budget.deadline is not None and self.conflicts % 512 == 0:
                    if time.perf_counter() > budget.deadline:
                        return "budget"
                if since_restart >= restart_limit:
                    self.restarts += 1
                    since_restart = 0
                    restart_limit = int(restart_limit * _RESTART_FACTOR)
                    self._backtrack(0)
                    if len(self.learnts) > self.max_learnts:
                        self._reduce_db()
            else:
                if len(self.trail) == self.nvars:
                    return "sat"
                self._decide()

    def _decide(self) -> None:
        V = self.nvars
        heap = self.heap
        val = self.val
        while True:
            _, v = heappop(heap)
            if val[v + V] == 0:
                break
        self.decisions += 1
        self.dlevel += 1
        self.trail_lim.append(len(self.trail))
        self._assign(v if self.phase[v] else -v, None)

    def model(self) -> tuple[bool, ...]:
        V = self.nvars
        return tuple(self.val[v + V] == 1 for v in range(0, V + 1))


def solve_builtin(
    formula: CnfFormula,
    *,
    max_conflicts: int | None = None,
    max_seconds: float | None = None,
    seed: int = 0,
) -> SolveOutcome:
    """Decide the formula with the built-in CDCL solver.

    Returns status "budget" when the conflict or wall-clock limit is hit
    before an answer is reached.  A "sat" outcome always carries a model that
    has been checked against every clause.
    """
    start = time.perf_counter()
    engine = _Cdcl(formula, seed)
    status = engine.solve(_Budget(max_conflicts, max_seconds))
    wall = time.perf_counter() - start
    stats = SolveStats(
        engine.decisions, engine.propagations, engine.conflicts, engine.restarts, wall
    )
    model = None
    if status == "sat":
        model = engine.model()
        if not check_model(formula, model):  # pragma: no cover - solver bug trap
            raise IntegrityError("built-in solver produced a bad model")
    return SolveOutcome(status, model, stats)


# -- external backend --------------------------------------------------------


def _parse_solver_output(text: str, num_vars: int) -> tuple[str | None, list[int]]:
    verdict: str | None = None
    lits: list[int] = []
    for line in text.splitlines():
        tokens = line.split()
        if not tokens:
            continue
        head = tokens[0]
        if head in ("s", "c"):
            tokens = tokens[1:]
        for tok in tokens:
            if verdict is None and tok in ("UNSATISFIABLE", "UNSAT"):
                verdict = "unsat"
                break
            if verdict is None and tok in ("SATISFIABLE", "SAT"):
                verdict = "sat"
                break
        if head == "v" or (verdict == "sat" and _all_ints(tokens)):
            for tok in tokens[1:] if head == "v" else tokens:
                try:
                    lit = int(tok)
                except ValueError:
                    continue
                if lit == 0:
                    return verdict, lits
                if abs(lit) <= num_vars:
                    lits.append(lit)
    return verdict, lits


def _all_ints(tokens: list[str]) -> bool:
    for tok in tokens:
        try:
            int(tok)
        except ValueError:
            return False
    return bool(tokens)


def solve_external(
    formula: CnfFormula,
    solver_path: str,
    *,
    max_seconds: float | None = None,
    cnf_path: str | None = None,
) -> SolveOutcome:
    """Run an external `solver file.cnf` process on the formula.

    The solver's stdout must contain a SAT/SATISFIABLE or UNSAT/UNSATISFIABLE
    verdict; for satisfiable formulas a model of space-separated literals
    terminated by 0 (bare or on "v" lines).  The model is re-verified locally.
    When cnf_path is given the DIMACS file is written there and kept;
    otherwise a temporary file is used and removed.
    """
    import shutil

    resolved = shutil.which(solver_path)
    if resolved is None and os.path.isfile(solver_path) and os.access(solver_path, os.X_OK):
        resolved = solver_path
    if resolved is None:
        raise ConfigError(f"external solver not found or not executable: {solver_path}")

    keep_cnf = cnf_path is not None
    if cnf_path is None:
        fd, cnf_path = tempfile.mkstemp(suffix=".cnf", prefix="pfasync_")
        handle = os.fdopen(fd, "w")
    else:
        handle = open(cnf_path, "w")
    start = time.perf_counter()
    try:
        with handle:
            handle.write(write_dimacs(formula))
        try:
            proc = subprocess.run(
                [resolved, cnf_path],
                capture_output=True,
                text=True,
                timeout=max_seconds,
            )
        except subprocess.TimeoutExpired:
            wall = time.perf_counter() - start
            return SolveOutcome("budget", None, SolveStats(0, 0, 0, 0, wall))
        wall = time.perf_counter() - start
        verdict, lits = _parse_solver_output(proc.stdout, formula.num_vars)
        if verdict is None:
            raise ParseError(
                f"no SAT/UNSAT verdict in output of {solver_path} "
                f"(exit code {proc.returncode})"
            )
        stats = SolveStats(0, 0, 0, 0, wall)
        if verdict == "unsat":
            return SolveOutcome("unsat", None, stats)
        assignment = [False] * (formula.num_vars + 1)
        for lit in lits:
            assignment[abs(lit)] = lit > 0
        model = tuple(assignment)
        if not check_model(formula, model):
            raise IntegrityError(
                f"model from {solver_path} does not satisfy the formula"
            )
        return SolveOutcome("sat", model, stats)
    finally:
        if not keep_cnf:
            try:
                os.unlink(cnf_path)
            except OSError:
                pass
