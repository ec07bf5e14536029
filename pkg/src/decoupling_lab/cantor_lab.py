"""Arithmetic Cantor sets at finite level, their energies and exponential sums.

Level ``i`` of the Cantor set with base ``n`` and alphabet ``D`` is realized on
the integers as ``{sum_{j<i} a_j n^j : a_j in D}``, which is the set of left
endpoints of the level-``i`` intervals dilated by ``n^i``.  Its lift to the
parabola is ``S_i = {(x, x^2)}``.  In this integer-frequency model the
``L^p`` norm over the unit torus of ``sum_f e(f.x)`` is exactly ``E_p^{1/p}``
for even ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import GridTooCoarse, InvariantViolation, OddP, SizeLimitError
from . import exponent_formulas as formulas

DEFAULT_POINT_LIMIT = 10**6
DEFAULT_SUPPORT_LIMIT = 10**7
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class CantorSpec:
    n: int
    alphabet: tuple[int, ...]
    level: int = 1

    def __post_init__(self):
        alphabet = tuple(int(d) for d in self.alphabet)
        object.__setattr__(self, "alphabet", alphabet)
        if self.n < 2:
            raise ValueError(f"base n={self.n} must be at least 2")
        if len(alphabet) < 2:
            raise ValueError("alphabet needs at least two digits")
        if any(x >= y for x, y in zip(alphabet, alphabet[1:])):
            raise ValueError(f"alphabet {alphabet} must be strictly increasing")
        if alphabet[0] < 0 or alphabet[-1] > self.n - 1:
            raise ValueError(f"alphabet digits must lie in [0, {self.n - 1}]")
        if self.level < 0:
            raise ValueError(f"level={self.level} must be nonnegative")

    @property
    def k(self) -> int:
        return len(self.alphabet)

    @property
    def alpha(self) -> float:
        return math.log(self.k) / math.log(self.n)

    @property
    def is_arithmetic(self) -> bool:
        steps = {y - x for x, y in zip(self.alphabet, self.alphabet[1:])}
        return len(steps) == 1


@dataclass(frozen=True)
class CantorLevel:
    spec: CantorSpec
    points: np.ndarray
    scale: int

    def parabola(self) -> np.ndarray:
        """The lattice points ``(x, x^2)`` as an ``(N, 2)`` integer array."""
        x = self.points.astype(np.int64)
        if self.scale**2 >= _INT64_SAFE:
            raise SizeLimitError("x^2 overflows 64-bit integers at this level")
        return np.stack([x, x * x], axis=1)


def build_cantor(spec: CantorSpec, limit: int = DEFAULT_POINT_LIMIT) -> CantorLevel:
    size = spec.k**spec.level
    if size > limit:
        raise SizeLimitError(f"level {spec.level} has {size} points, above the limit {limit}")
    scale = spec.n**spec.level
    if scale >= _INT64_SAFE:
        raise SizeLimitError(f"scale n^i = {scale} does not fit in 64-bit integers")
    digits = np.asarray(spec.alphabet, dtype=np.int64)
    points = np.zeros(1, dtype=np.int64)
    for j in range(spec.level):
        points = (points[:, None] + digits[None, :] * spec.n**j).ravel()
    points.sort()
    return CantorLevel(spec, points, scale)


# -- AD regularity -------------------------------------------------------------


@dataclass(frozen=True)
class RegularityReport:
    alpha: float
    c_ad: Fraction
    upper_witness: tuple[int, int, int]
    lower_witness: tuple[int, int, int]
    note: str = "minimal over dyadic windows centred at interval midpoints; true constant within a factor 2"

    def holds_for(self, level: CantorLevel) -> bool:
        """Recheck both regularity inequalities with this report's constant."""
        if level.spec.k == level.spec.n:
            return all(
                int(c) <= self.c_ad * w and w <= self.c_ad * int(c)
                for w, counts in _window_counts(level) for c in counts
            )
        log_c = math.log(self.c_ad) * (1 + 1e-12)
        for width, counts in _window_counts(level):
            scaled = self.alpha * math.log(width)
            logs = np.log(counts)
            if np.any(np.abs(logs - scaled) > log_c + 1e-12):
                return False
        return True


def _window_counts(level: CantorLevel):
    """Yield (width, counts) for dyadic widths 2 .. 4 n^i.

    A window of even integer width ``L`` centred at the midpoint of the unit
    interval ``[x, x+1]`` contains the unit intervals ``[p, p+1]`` with
    ``x - L/2 + 1 <= p <= x + L/2 - 1``.
    """
    pts = level.points
    width = 2
    while width <= 4 * level.scale:
        lo = np.searchsorted(pts, pts - width // 2 + 1, side="left")
        hi = np.searchsorted(pts, pts + width // 2 - 1, side="right")
        yield width, hi - lo
        width *= 2


def check_ad_regular(level: CantorLevel) -> RegularityReport:
    if level.spec.k == level.spec.n:
        return _check_full(level)
    alpha = level.spec.alpha
    worst_up = worst_low = (-math.inf, None)
    for width, counts in _window_counts(level):
        dev = np.log(counts) - alpha * math.log(width)
        i = int(np.argmax(dev))
        if dev[i] > worst_up[0]:
            worst_up = (float(dev[i]), (int(level.points[i]), width, int(counts[i])))
        i = int(np.argmin(dev))
        if -dev[i] > worst_low[0]:
            worst_low = (float(-dev[i]), (int(level.points[i]), width, int(counts[i])))
    log_c = max(worst_up[0], worst_low[0], 0.0)
    # round outward so that the rational constant is a safe upper bound
    c_ad = Fraction(math.exp(log_c) * (1 + 1e-9))
    return RegularityReport(alpha, max(c_ad, Fraction(1)), worst_up[1], worst_low[1])


def _check_full(level: CantorLevel) -> RegularityReport:
    # alpha = 1: (|J| R)^alpha is the integer width, so everything is exact
    worst_up = worst_low = (Fraction(0), None)
    for width, counts in _window_counts(level):
        i = int(np.argmax(counts))
        if Fraction(int(counts[i]), width) > worst_up[0]:
            worst_up = (Fraction(int(counts[i]), width), (int(level.points[i]), width, int(counts[i])))
        i = int(np.argmin(counts))
        if Fraction(width, int(counts[i])) > worst_low[0]:
            worst_low = (Fraction(width, int(counts[i])), (int(level.points[i]), width, int(counts[i])))
    c_ad = max(worst_up[0], worst_low[0], Fraction(1))
    return RegularityReport(1.0, c_ad, worst_up[1], worst_low[1])


# -- energies and sumsets ---------------------------------------------------------


def _as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] not in (1, 2):
        raise ValueError("points must be integers or integer pairs")
    if len(arr) == 0:
        raise ValueError("empty point set")
    return np.unique(arr, axis=0)


def _encode(arr: np.ndarray, fold: int) -> tuple[np.ndarray, list[int], list[int]]:
    """Map vectors to integer keys so that keys add like vectors for up to ``fold`` summands."""
    lo = arr.min(axis=0)
    shifted = arr - lo
    radix = [int(fold * shifted[:, d].max()) + 1 for d in range(arr.shape[1])]
    total = 1
    for r in radix:
        total *= r
    if total >= _INT64_SAFE:
        raise SizeLimitError("coordinates too large to encode")
    keys = np.zeros(len(arr), dtype=np.int64)
    mult = 1
    for d, r in enumerate(radix):
        keys += shifted[:, d] * mult
        mult *= r
    return keys, [int(x) for x in lo], radix


def _decode(keys: np.ndarray, lo: list[int], radix: list[int], fold: int) -> np.ndarray:
    cols = []
    rem = keys.copy()
    for d, r in enumerate(radix):
        cols.append(rem % r + fold * lo[d])
        rem //= r
    return np.stack(cols, axis=1)


def representation_function(points, fold: int, limit: int = DEFAULT_SUPPORT_LIMIT):
    """Keys and counts of ``r(x) = #{(f_1..f_fold): f_1+...+f_fold = x}``.

    Returns ``(sums, counts)`` with ``sums`` an ``(M, d)`` array of the
    distinct ``fold``-fold sums.  Counts are int64 when they provably fit,
    Python ints otherwise.
    """
    arr = _as_points(points)
    keys, lo, radix = _encode(arr, fold)
    big = len(arr) ** fold >= _INT64_SAFE
    sums = np.zeros(1, dtype=np.int64)
    counts = np.ones(1, dtype=object if big else np.int64)
    for _ in range(fold):
        if len(sums) * len(keys) > limit:
            raise SizeLimitError(f"convolution table of size {len(sums) * len(keys)} exceeds {limit}")
        s = (sums[:, None] + keys[None, :]).ravel()
        w = np.repeat(counts, len(keys))
        order = np.argsort(s, kind="stable")
        s, w = s[order], w[order]
        starts = np.flatnonzero(np.r_[True, s[1:] != s[:-1]])
        sums = s[starts]
        counts = np.add.reduceat(w, starts)
    return _decode(sums, lo, radix, fold), counts


def _sum_squares(counts) -> int:
    if counts.dtype != object and len(counts) and int(counts.max()) ** 2 * len(counts) < _INT64_SAFE:
        return int(np.dot(counts, counts))
    return sum(int(c) * int(c) for c in counts)


def _diagonal_count(size: int, half: int) -> int:
    """Tuples whose second half permutes the first: sum over multisets of
    size ``half`` of (multinomial coefficient)^2."""
    # (half!)^2 [x^half] (sum_mu x^mu / mu!^2)^size
    base = [Fraction(1, math.factorial(mu) ** 2) for mu in range(half + 1)]

    def mul(u, v):
        out = [Fraction(0)] * (half + 1)
        for i, x in enumerate(u):
            if x:
                for j in range(half + 1 - i):
                    out[i + j] += x * v[j]
        return out

    result = [Fraction(1)] + [Fraction(0)] * half
    e = size
    while e:
        if e & 1:
            result = mul(result, base)
        base = mul(base, base)
        e >>= 1
    value = result[half] * math.factorial(half) ** 2
    assert value.denominator == 1
    return int(value)


@dataclass(frozen=True)
class EnergyReport:
    p: int
    energy: int
    diagonal_lower: int
    cs_lower: Fraction
    dp_lower: float
    size: int
    sumset_size: int


def energy(points, p: int, limit: int = DEFAULT_SUPPORT_LIMIT) -> EnergyReport:
    """Additive p-energy: #{(f_1..f_p): f_1+..+f_{p/2} = f_{p/2+1}+..+f_p}."""
    if p < 2 or p % 2:
        raise OddP(f"energy needs an even p >= 2, got {p}")
    arr = _as_points(points)
    half = p // 2
    _, counts = representation_function(arr, half, limit)
    e = _sum_squares(counts)
    size = len(arr)
    diag = _diagonal_count(size, half)
    report = EnergyReport(
        p=p,
        energy=e,
        diagonal_lower=diag,
        cs_lower=Fraction(size**p, len(counts)),
        dp_lower=math.exp(math.log(e) / p) / math.sqrt(size),
        size=size,
        sumset_size=len(counts),
    )
    if not (size**half <= diag <= e and e >= math.ceil(report.cs_lower)):
        raise InvariantViolation("energy lower-bound chain violated")
    return report


@dataclass(frozen=True)
class Sumset:
    elements: np.ndarray
    cardinality: int


def sumset(points, fold: int, limit: int = DEFAULT_SUPPORT_LIMIT) -> Sumset:
    if fold < 2:
        raise ValueError("fold must be at least 2")
    sums, _ = representation_function(points, fold, limit)
    if sums.shape[1] == 1:
        sums = sums[:, 0]
    return Sumset(sums, len(sums))


# -- exponential sums ---------------------------------------------------------------


def min_grid(freqs, p) -> list[int]:
    """Per-dimension grid size guaranteeing exact even-p norms."""
    arr = _as_points(freqs)
    reach = np.abs(arr).max(axis=0)
    mult = 4 * math.ceil(p / 2)
    return [int(mult * (r + 1)) for r in reach]


def _default_grid(freqs, p) -> list[int]:
    arr = _as_points(freqs)
    return [max(g, 8 * int(np.abs(arr[:, d]).max()) + 8) for d, g in enumerate(min_grid(arr, p))]


def exp_sum_norm(
    freqs, p: float, grid_per_dim: int | Sequence[int] | None = None, cell_limit: int = 10**9
) -> float:
    """``(mean over a torus grid of |sum_f e(<f, x>)|^p)^{1/p}``.

    ``grid_per_dim`` may be one size for every dimension or one per
    dimension; by default the exact size of :func:`min_grid` is used, and
    never less than eight times the largest frequency.  For even ``p`` a grid
    below :func:`min_grid` raises :class:`GridTooCoarse`; for other ``p`` the
    result is a quadrature estimate.  Two-dimensional grids are evaluated in
    row blocks so memory stays bounded.
    """
    p = float(p)
    if p < 2:
        raise ValueError("p must be at least 2")
    arr = _as_points(freqs)
    dim = arr.shape[1]
    need = min_grid(arr, p)
    if grid_per_dim is None:
        grid = _default_grid(arr, p)
    elif np.isscalar(grid_per_dim):
        grid = [int(grid_per_dim)] * dim
    else:
        grid = [int(g) for g in grid_per_dim]
        if len(grid) != dim:
            raise ValueError("one grid size per dimension required")
    even = float(p).is_integer() and int(p) % 2 == 0
    if even and any(g < r for g, r in zip(grid, need)):
        raise GridTooCoarse(f"grid {grid} below the exactness threshold {need} for p={p}")
    cells = math.prod(grid)
    if cells > cell_limit:
        raise SizeLimitError(f"grid of {cells} cells exceeds the limit {cell_limit}")
    if dim == 1:
        mass = np.zeros(grid[0], dtype=np.complex128)
        np.add.at(mass, arr[:, 0] % grid[0], 1.0)
        # ifft carries 1/G; undo it to get sum_f e(f k/G)
        return float(np.mean(np.abs(np.fft.ifft(mass) * grid[0]) ** p) ** (1.0 / p))
    gx, gy = grid
    cols = arr[:, 1] % gy
    block = max(1, min(gx, 2**22 // gy))
    total = 0.0
    for start in range(0, gx, block):
        rows = np.arange(start, min(start + block, gx))
        phase = np.exp(2j * np.pi * np.outer(rows, arr[:, 0]) / gx)
        mass = np.zeros((len(rows), gy), dtype=np.complex128)
        np.add.at(mass.T, cols, phase.T)
        total += float(np.sum(np.abs(np.fft.ifft(mass, axis=1) * gy) ** p))
    return float((total / cells) ** (1.0 / p))


@dataclass(frozen=True)
class DecouplingProbe:
    ratio: float
    theoretical_cap: float | None
    exact: bool


def empirical_dec_lower(
    level: CantorLevel, p: float, grid_per_dim=None, cell_limit: int = 10**9
) -> DecouplingProbe:
    """Lower bound for Dec_p(C_i) from the test function with one frequency per cap.

    ``theoretical_cap`` is ``k^{i(1/2 - 3/p - c_{p,alpha})}``, available for p > 6.
    """
    pts = level.parabola()
    norm = exp_sum_norm(pts, p, grid_per_dim, cell_limit)
    ratio = norm / math.sqrt(len(pts))
    cap = None
    if p > 6 and level.spec.k < level.spec.n:
        alpha = Fraction(level.spec.alpha)
        pq = Fraction(p).limit_denominator(10**6) if isinstance(p, float) else Fraction(p)
        c = formulas.c_exponent(pq, alpha)
        cap = level.spec.k ** (level.spec.level * float(Fraction(1, 2) - 3 / pq - c))
    even = float(p).is_integer() and int(p) % 2 == 0
    return DecouplingProbe(ratio, cap, even)


@dataclass(frozen=True)
class DpLower:
    value: float
    per_level: tuple[float, ...]
    kp_root_range: tuple[float, float] | None


def d_p_lower_from_energy(level: CantorLevel, p: int) -> DpLower:
    """``E_p(C_i)^{1/p} / (#C_i)^{1/2}``.

    For arithmetic-progression alphabets the constant ``K_p^{1/p}`` is fitted
    level by level as ``k^{1/2-1/p}`` divided by the growth of this ratio from
    level ``j-1`` to ``j``; its range over ``j = 1..i`` is reported.
    """
    value = energy(level.points, p).dp_lower
    spec = level.spec
    if not spec.is_arithmetic or spec.level == 0:
        return DpLower(value, (), None)
    ratios = [1.0]
    for j in range(1, spec.level + 1):
        sub = build_cantor(CantorSpec(spec.n, spec.alphabet, j))
        ratios.append(energy(sub.points, p).dp_lower)
    target = spec.k ** (0.5 - 1.0 / p)
    fitted = [target / (ratios[j] / ratios[j - 1]) for j in range(1, len(ratios))]
    return DpLower(value, tuple(ratios[1:]), (min(fitted), max(fitted)))


# -- report rows ------------------------------------------------------------------


def _num(x):
    return None if x in (None, "") else float(x)


@dataclass(frozen=True)
class LevelReport:
    """Energy, sumset and regularity summary of one Cantor level."""

    n: int
    k: int
    i: int
    alpha: float
    p: int
    E_p: int
    dp_lower: float
    cs_lower: Fraction
    sumset_card: int
    c_ad: Fraction

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["cs_lower"] = _fmt(self.cs_lower)
        d["c_ad"] = _fmt(self.c_ad)
        return d

    @classmethod
    def from_dict(cls, d) -> "LevelReport":
        return cls(int(d["n"]), int(d["k"]), int(d["i"]), float(d["alpha"]), int(d["p"]),
                   int(d["E_p"]), float(d["dp_lower"]), Fraction(d["cs_lower"]),
                   int(d["sumset_card"]), Fraction(d["c_ad"]))


def level_report(spec: CantorSpec, p: int, limit: int = DEFAULT_SUPPORT_LIMIT) -> LevelReport:
    level = build_cantor(spec)
    e = energy(level.points, p, limit)
    reg = check_ad_regular(level)
    # sumset_card is the (p/2)-fold sumset the energy is built from
    return LevelReport(spec.n, spec.k, spec.level, spec.alpha, p, e.energy, e.dp_lower,
                       e.cs_lower, e.sumset_size, reg.c_ad)


@dataclass(frozen=True)
class ProbeReport:
    """Exponential-sum norm of the parabola lift and the decoupling ratio."""

    n: int
    k: int
    i: int
    alpha: float
    p: float
    grid: tuple[int, int]
    norm: float
    ratio: float
    theoretical_cap: float | None
    exact: bool

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["grid"] = "x".join(str(g) for g in self.grid)
        return d

    @classmethod
    def from_dict(cls, d) -> "ProbeReport":
        grid = d["grid"]
        if isinstance(grid, str):
            grid = grid.split("x")
        exact = d["exact"]
        if isinstance(exact, str):
            exact = exact.lower() == "true"
        return cls(int(d["n"]), int(d["k"]), int(d["i"]), float(d["alpha"]), float(d["p"]),
                   tuple(int(g) for g in grid), float(d["norm"]), float(d["ratio"]),
                   _num(d["theoretical_cap"]), bool(exact))


def probe_report(spec: CantorSpec, p: float, grid_per_dim=None, cell_limit: int = 10**9) -> ProbeReport:
    level = build_cantor(spec)
    pts = level.parabola()
    if grid_per_dim is None:
        grid = _default_grid(pts, p)
    elif np.isscalar(grid_per_dim):
        grid = [int(grid_per_dim)] * 2
    else:
        grid = [int(g) for g in grid_per_dim]
    probe = empirical_dec_lower(level, p, grid, cell_limit)
    norm = probe.ratio * math.sqrt(len(pts))
    return ProbeReport(spec.n, spec.k, spec.level, spec.alpha, float(p), tuple(grid), norm,
                       probe.ratio, probe.theoretical_cap, probe.exact)


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
