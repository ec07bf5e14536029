"""Exact rational linear programming.

Rationals are :class:`fractions.Fraction` throughout; nothing in this module
rounds.  The solver is a dense two-phase tableau simplex with Bland's
anti-cycling rule, which is slow but exact and deterministic.  Programs here
have at most a few hundred columns.

A :class:`LinearProgram` always *maximizes* its objective.  Constraints are
labelled so that certificates and feasibility reports can refer to them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from .errors import (
    InvariantViolation,
    MalformedProgram,
    MissingVariable,
    NegativeWeight,
    NotACertificate,
    WeightsNotNormalized,
)

NONNEG = "nonnegative"
FREE = "free"
LE, EQ, GE = "<=", "=", ">="

_REL_ALIASES = {"<=": LE, "≤": LE, "=": EQ, "==": EQ, ">=": GE, "≥": GE}


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: they would silently bring rounding into exact code.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip().replace("−", "-"))
        except ValueError:
            raise ValueError(f"not a rational: {value!r}") from None
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot use {type(value).__name__} {value!r} as an exact rational")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _form(coeffs: Mapping[str, object]) -> dict[str, Fraction]:
    out = {}
    for name, c in coeffs.items():
        c = as_rational(c)
        if c != 0:
            out[name] = c
    return out


def evaluate_form(coeffs: Mapping[str, Fraction], point: Mapping[str, Fraction]) -> Fraction:
    return sum((c * point[v] for v, c in coeffs.items()), Fraction(0))


@dataclass(frozen=True)
class Variable:
    name: str
    sign: str = NONNEG

    def __post_init__(self):
        if self.sign not in (NONNEG, FREE):
            raise MalformedProgram(f"variable {self.name!r}: unknown sign {self.sign!r}")


@dataclass(frozen=True)
class Constraint:
    label: str
    coeffs: Mapping[str, Fraction]
    rel: str
    rhs: Fraction

    def __post_init__(self):
        rel = _REL_ALIASES.get(self.rel)
        if rel is None:
            raise MalformedProgram(f"constraint {self.label!r}: unknown relation {self.rel!r}")
        object.__setattr__(self, "rel", rel)
        object.__setattr__(self, "coeffs", _form(self.coeffs))
        object.__setattr__(self, "rhs", as_rational(self.rhs))

    def lhs(self, point: Mapping[str, Fraction]) -> Fraction:
        return evaluate_form(self.coeffs, point)

    def holds(self, point: Mapping[str, Fraction]) -> bool:
        lhs = self.lhs(point)
        if self.rel == LE:
            return lhs <= self.rhs
        if self.rel == GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class LinearProgram:
    """Maximize ``objective`` over ``variables`` subject to ``constraints``."""

    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    objective: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "objective", _form(self.objective))
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise MalformedProgram("duplicate variable name")
        known = set(names)
        labels = set()
        for con in self.constraints:
            if con.label in labels:
                raise MalformedProgram(f"duplicate constraint label {con.label!r}")
            labels.add(con.label)
            unknown = set(con.coeffs) - known
            if unknown:
                raise MalformedProgram(f"constraint {con.label!r} uses unknown variable(s) {sorted(unknown)}")
        unknown = set(self.objective) - known
        if unknown:
            raise MalformedProgram(f"objective uses unknown variable(s) {sorted(unknown)}")

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    def sign_of(self, name: str) -> str:
        for v in self.variables:
            if v.name == name:
                return v.sign
        raise MalformedProgram(f"unknown variable {name!r}")

    def constraint(self, label: str) -> Constraint:
        for con in self.constraints:
            if con.label == label:
                return con
        raise KeyError(label)

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        def coeffs(form):
            return {k: format_rational(v) for k, v in form.items()}

        return {
            "vars": [{"name": v.name, "sign": v.sign} for v in self.variables],
            "constraints": [
                {"label": c.label, "coeffs": coeffs(c.coeffs), "rel": c.rel, "rhs": format_rational(c.rhs)}
                for c in self.constraints
            ],
            "objective": {"sense": "max", "coeffs": coeffs(self.objective)},
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "LinearProgram":
        try:
            variables = [Variable(v["name"], v.get("sign", NONNEG)) for v in doc["vars"]]
            constraints = [
                Constraint(c["label"], c["coeffs"], c["rel"], c["rhs"]) for c in doc["constraints"]
            ]
            obj = doc.get("objective", {})
        except (KeyError, TypeError) as exc:
            raise MalformedProgram(f"bad program document: {exc}") from None
        if obj.get("sense", "max") != "max":
            raise MalformedProgram("only maximization programs are supported")
        return cls(tuple(variables), tuple(constraints), obj.get("coeffs", {}))

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "LinearProgram":
        return cls.from_dict(json.loads(text))


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class LpSolution:
    status: Status
    value: Fraction | None = None
    point: Mapping[str, Fraction] | None = None


# -- simplex -----------------------------------------------------------------


class _Tableau:
    """Dense simplex tableau; the last entry of every row is its right-hand side."""

    def __init__(self, rows, basis, ncols):
        self.rows = rows
        self.basis = basis
        self.ncols = ncols
        self.allowed = [True] * ncols
        self.obj = None

    def set_objective(self, costs):
        d = list(costs) + [Fraction(0)]
        for row, bcol in zip(self.rows, self.basis):
            cb = costs[bcol]
            if cb:
                for j, a in enumerate(row):
                    if a:
                        d[j] -= cb * a
        # d[-1] now holds minus the objective value
        self.obj = d

    def value(self) -> Fraction:
        return -self.obj[-1]

    def pivot(self, r, e):
        prow = self.rows[r]
        piv = prow[e]
        if piv != 1:
            prow = [a / piv if a else a for a in prow]
            self.rows[r] = prow
        nz = [j for j, a in enumerate(prow) if a]
        for i, row in enumerate(self.rows):
            if i != r:
                f = row[e]
                if f:
                    for j in nz:
                        row[j] -= f * prow[j]
        f = self.obj[e]
        if f:
            for j in nz:
                self.obj[j] -= f * prow[j]
        self.basis[r] = e

    def run(self) -> Status:
        while True:
            entering = next((j for j in range(self.ncols) if self.allowed[j] and self.obj[j] > 0), None)
            if entering is None:
                return Status.OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (row[-1] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return Status.UNBOUNDED
            self.pivot(best[1], entering)


def solve_lp(problem: LinearProgram) -> LpSolution:
    """Solve ``problem`` exactly.

    Free variables are split into differences of two nonnegative columns and
    recombined in the returned point.  Equalities are kept as equalities and
    receive an artificial column in phase one.
    """
    columns = []  # (variable name, +1 or -1)
    for v in problem.variables:
        columns.append((v.name, 1))
        if v.sign == FREE:
            columns.append((v.name, -1))
    index = {}
    for j, (name, s) in enumerate(columns):
        index.setdefault(name, []).append((j, s))
    nstruct = len(columns)

    specs = []
    for con in problem.constraints:
        dense = [Fraction(0)] * nstruct
        for name, c in con.coeffs.items():
            for j, s in index[name]:
                dense[j] = c * s
        rel, rhs = con.rel, con.rhs
        if rhs < 0:
            dense = [-a for a in dense]
            rhs = -rhs
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        specs.append((dense, rel, rhs))

    nslack = sum(1 for _, rel, _ in specs if rel != EQ)
    nart = sum(1 for _, rel, _ in specs if rel != LE)
    ncols = nstruct + nslack + nart
    rows, basis = [], []
    slack = nstruct
    art = nstruct + nslack
    art_cols = []
    for dense, rel, rhs in specs:
        row = dense + [Fraction(0)] * (nslack + nart) + [rhs]
        if rel == LE:
            row[slack] = Fraction(1)
            basis.append(slack)
            slack += 1
        else:
            if rel == GE:
                row[slack] = Fraction(-1)
                slack += 1
            row[art] = Fraction(1)
            basis.append(art)
            art_cols.append(art)
            art += 1
        rows.append(row)

    tab = _Tableau(rows, basis, ncols)
    if art_cols:
        phase1 = [Fraction(0)] * ncols
        for j in art_cols:
            phase1[j] = Fraction(-1)
        tab.set_objective(phase1)
        tab.run()
        if tab.value() < 0:
            return LpSolution(Status.INFEASIBLE)
        artificial = set(art_cols)
        for j in art_cols:
            tab.allowed[j] = False
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] in artificial:
                row = tab.rows[r]
                e = next((j for j in range(ncols) if tab.allowed[j] and row[j]), None)
                if e is None:
                    # redundant equality
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, e)
            r += 1

    costs = [Fraction(0)] * ncols
    for j, (name, s) in enumerate(columns):
        costs[j] = problem.objective.get(name, Fraction(0)) * s
    tab.set_objective(costs)
    status = tab.run()
    if status is Status.UNBOUNDED:
        return LpSolution(Status.UNBOUNDED)

    colval = [Fraction(0)] * ncols
    for row, bcol in zip(tab.rows, tab.basis):
        colval[bcol] = row[-1]
    point = {v.name: Fraction(0) for v in problem.variables}
    for j, (name, s) in enumerate(columns):
        point[name] += s * colval[j]
    value = evaluate_form(problem.objective, point)
    if value != tab.value():
        raise InvariantViolation("simplex objective disagrees with its own point")
    return LpSolution(Status.OPTIMAL, value, point)


# -- feasibility ---------------------------------------------------------------


class Violation(NamedTuple):
    label: str
    lhs: Fraction
    rhs: Fraction


def check_feasible(problem: LinearProgram, point: Mapping[str, object]) -> list[Violation]:
    """Return every constraint or sign restriction that ``point`` violates."""
    missing = [n for n in problem.names if n not in point]
    if missing:
        raise MissingVariable(f"point does not assign {missing}")
    pt = {n: as_rational(point[n]) for n in problem.names}
    out = []
    for v in problem.variables:
        if v.sign == NONNEG and pt[v.name] < 0:
            out.append(Violation(f"{v.name} >= 0", pt[v.name], Fraction(0)))
    for con in problem.constraints:
        if not con.holds(pt):
            out.append(Violation(con.label, con.lhs(pt), con.rhs))
    return out


# -- certificates --------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """``target <= bound + sum(residual[v] * v)`` with every residual term <= 0.

    ``multipliers`` holds the nonnegative (free for equalities) weight put on
    each constraint, including the caller-supplied weights.
    """

    target: str
    bound: Fraction
    multipliers: Mapping[str, Fraction]
    residual: Mapping[str, Fraction]


def _as_le(con: Constraint) -> list[tuple[dict[str, Fraction], Fraction, bool]]:
    """Constraint as (form, rhs, free_multiplier) with form . x <= rhs."""
    if con.rel == LE:
        return [(dict(con.coeffs), con.rhs, False)]
    if con.rel == GE:
        return [({k: -c for k, c in con.coeffs.items()}, -con.rhs, False)]
    return [(dict(con.coeffs), con.rhs, True)]


def weighted_certificate(
    problem: LinearProgram, weights: Mapping[str, object], target: str
) -> Certificate:
    """Best certificate for ``target`` that extends the given convex weights.

    The weighted ``<=`` constraints are averaged into one inequality.  The
    remaining constraints may then be added with any admissible multipliers
    (nonnegative, or free for equalities) as long as the target coefficient
    is left unchanged; the cheapest such completion is found by solving the
    corresponding dual program exactly.  The result is re-verified term by
    term before it is returned.
    """
    problem.sign_of(target)
    w = {}
    for label, val in weights.items():
        val = as_rational(val)
        if val < 0:
            raise NegativeWeight(f"weight on {label!r} is {val}")
        try:
            con = problem.constraint(label)
        except KeyError:
            raise MalformedProgram(f"no constraint labelled {label!r}") from None
        if con.rel != LE:
            raise NotACertificate(f"weighted constraint {label!r} is not a <= constraint")
        w[label] = val
    if sum(w.values(), Fraction(0)) != 1:
        raise WeightsNotNormalized(f"weights sum to {sum(w.values(), Fraction(0))}, not 1")

    combined: dict[str, Fraction] = {}
    rhs0 = Fraction(0)
    for label, val in w.items():
        con = problem.constraint(label)
        for v, c in con.coeffs.items():
            combined[v] = combined.get(v, Fraction(0)) + val * c
        rhs0 += val * con.rhs
    t = combined.get(target, Fraction(0))
    if t <= 0:
        raise NotACertificate(f"weighted combination does not bound {target!r} from above")

    # dual program: choose multipliers y on the other constraints
    others = [c for c in problem.constraints if c.label not in w]
    yvars, cols = [], []
    for con in others:
        form, rhs, free = _as_le(con)[0]
        name = f"y[{con.label}]"
        yvars.append(Variable(name, FREE if free else NONNEG))
        cols.append((name, form, rhs))
    dual_cons = []
    for var in problem.variables:
        coeffs = {name: form[var.name] for name, form, _ in cols if var.name in form}
        base = combined.get(var.name, Fraction(0))
        if var.name == target:
            rel, rhs = EQ, Fraction(0)
        elif var.sign == FREE:
            rel, rhs = EQ, -base
        else:
            rel, rhs = GE, -base
        if not coeffs:
            ok = (rhs == 0) if rel == EQ else (rhs <= 0)
            if not ok:
                raise NotACertificate(f"coefficient of {var.name!r} cannot be eliminated")
            continue
        dual_cons.append(Constraint(f"elim[{var.name}]", coeffs, rel, rhs))
    dual = LinearProgram(
        tuple(yvars),
        tuple(dual_cons),
        {name: -rhs for name, _, rhs in cols},
    )
    sol = solve_lp(dual)
    if sol.status is Status.INFEASIBLE:
        raise NotACertificate("the remaining constraints cannot eliminate the non-target variables")
    if sol.status is Status.UNBOUNDED:
        raise NotACertificate("the non-weighted constraints are infeasible; the bound is vacuous")

    multipliers = dict(w)
    total = dict(combined)
    total_rhs = rhs0
    for con, (name, form, rhs) in zip(others, cols):
        y = sol.point[name]
        if y:
            multipliers[con.label] = y if con.rel != GE else -y
            for v, c in form.items():
                total[v] = total.get(v, Fraction(0)) + y * c
            total_rhs += y * rhs
    if total.get(target, Fraction(0)) != t:
        raise InvariantViolation("certificate changed the target coefficient")
    residual = {}
    for var in problem.variables:
        if var.name == target:
            continue
        r = -total.get(var.name, Fraction(0)) / t
        if (var.sign == FREE and r != 0) or r > 0:
            raise InvariantViolation(f"certificate residual on {var.name!r} has the wrong sign")
        if r:
            residual[var.name] = r
    return Certificate(target, total_rhs / t, multipliers, residual)


def weighted_bound(problem: LinearProgram, weights: Mapping[str, object], target: str) -> Fraction:
    """Upper bound on ``target`` implied by averaging constraints with ``weights``.

    Raises :class:`NotACertificate` when the averaged inequality cannot be
    completed to a valid bound.
    """
    return weighted_certificate(problem, weights, target).bound


def make_program(
    variables: Iterable[tuple[str, str]] | Iterable[Variable],
    constraints: Iterable[tuple],
    objective: Mapping[str, object],
) -> LinearProgram:
    """Convenience constructor from plain tuples ``(label, coeffs, rel, rhs)``."""
    vs = tuple(v if isinstance(v, Variable) else Variable(*v) for v in variables)
    cs = tuple(c if isinstance(c, Constraint) else Constraint(*c) for c in constraints)
    return LinearProgram(vs, cs, objective)
