"""Phase diagrams over (sigma, b) and radius-versus-lambda scans, written as CSV."""

from __future__ import annotations

import csv
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import (
    BracketInvalid,
    DegenerateDenominator,
    DegenerateTransitionNumber,
    IndeterminateBranch,
    InvalidParameters,
    NoCycleFound,
    NonFiniteState,
    StepSizeUnderflow,
    WrongClass,
    WrongSide,
)
from .reduced import (
    SystemKind,
    hopf_prediction,
    make_system,
    radius_by_binary_search,
    return_map,
)
from .spectrum import DEFAULT_TIE_TOL, PartitionClass, SystemParams, analyze, growth_rate
from .transition import classify, single_hopf_numbers

LABELS = ("continuous", "catastrophic", "mixed", "degenerate", "indeterminate")
_CLASSIFIED = {"continuous", "catastrophic", "mixed"}


@dataclass(frozen=True)
class GridSpec:
    sigma_range: tuple[float, float, int] = (0.0, 10.0, 51)
    b_range: tuple[float, float, int] = (0.0, 2.0, 101)

    def __post_init__(self):
        for name in ("sigma_range", "b_range"):
            lo, hi, count = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise InvalidParameters(f"{name}: need finite lo < hi, got {lo!r}, {hi!r}")
            if int(count) != count or count < 2:
                raise InvalidParameters(f"{name}: count must be an integer >= 2, got {count!r}")

    @property
    def sigmas(self) -> np.ndarray:
        lo, hi, n = self.sigma_range
        return np.linspace(lo, hi, int(n))

    @property
    def bs(self) -> np.ndarray:
        lo, hi, n = self.b_range
        return np.linspace(lo, hi, int(n))


def thread_count(env: Optional[dict] = None) -> int:
    env = os.environ if env is None else env
    cap = os.cpu_count() or 1
    raw = env.get("SH3_THREADS")
    if raw is None:
        return cap
    try:
        n = int(raw)
    except ValueError:
        raise InvalidParameters(f"SH3_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InvalidParameters(f"SH3_THREADS must be a positive integer, got {raw!r}")
    return n


def cell_label(ell: float, sigma: float, b: float, tie_tol: float = DEFAULT_TIE_TOL) -> str:
    try:
        return classify(ell, sigma, b, tie_tol).ttype.value
    except (DegenerateTransitionNumber, DegenerateDenominator):
        return "degenerate"
    except IndeterminateBranch:
        return "indeterminate"


@dataclass(frozen=True)
class PhaseDiagram:
    ell: float
    grid: GridSpec
    rows: tuple[tuple[float, float, str], ...]
    boundary: tuple[tuple[float, float], ...]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("sigma", "b", "class"))
            for s, b, label in self.rows:
                w.writerow((f"{s:.17g}", f"{b:.17g}", label))

    def write_boundary_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("sigma", "b_critical"))
            for s, b in self.boundary:
                w.writerow((f"{s:.17g}", f"{b:.17g}"))


def _bisect_label(label: Callable[[float], str], lo: float, hi: float, xtol: float) -> float:
    left = label(lo)
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if label(mid) == left:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def phase_diagram(
    ell: float,
    grid: GridSpec = GridSpec(),
    tie_tol: float = DEFAULT_TIE_TOL,
    threads: Optional[int] = None,
    b_tol: float = 1e-10,
    progress: Optional[Callable[[int, int], None]] = None,
) -> PhaseDiagram:
    """Label every (sigma, b) node and trace label changes along each sigma row.

    Rows are ordered sigma-major, then b.  For each sigma, every adjacent pair
    of b nodes carrying two different definite labels contributes one boundary
    point located by bisection in b to ``b_tol``.
    """
    cls = analyze(ell, tie_tol).partition_class
    if cls not in (PartitionClass.I2, PartitionClass.I4):
        raise WrongClass(f"phase diagrams need class I2 or I4, ell={ell!r} is {cls.name}")
    sigmas, bs = grid.sigmas, grid.bs
    workers = threads or thread_count()

    def row(sigma):
        return [cell_label(ell, float(sigma), float(b), tie_tol) for b in bs]

    def crossings(item):
        sigma, labels = item
        out = []
        for j in range(len(bs) - 1):
            a, c = labels[j], labels[j + 1]
            if a != c and a in _CLASSIFIED and c in _CLASSIFIED:
                f = lambda b: cell_label(ell, float(sigma), b, tie_tol)  # noqa: E731
                out.append((float(sigma), _bisect_label(f, float(bs[j]), float(bs[j + 1]), b_tol)))
        return out

    with ThreadPoolExecutor(max_workers=workers) as pool:
        labels = []
        for i, lab in enumerate(pool.map(row, sigmas)):
            labels.append(lab)
            if progress:
                progress(i + 1, len(sigmas))
        boundary = [pt for pts in pool.map(crossings, zip(sigmas, labels)) for pt in pts]

    rows = tuple(
        (float(s), float(b), lab) for s, lab_row in zip(sigmas, labels) for b, lab in zip(bs, lab_row)
    )
    return PhaseDiagram(ell, grid, rows, tuple(boundary))


@dataclass(frozen=True)
class RadiusRow:
    lam: float
    radius_numeric: float
    radius_analytic: float
    method: str


def _radius_row(ell, sigma, b, lam, method, bracket, manifold_at) -> RadiusRow:
    a = analyze(ell)
    p = SystemParams(ell, sigma, b, lam)
    beta = growth_rate(a.k, p)
    if lam == a.lambda0:
        return RadiusRow(lam, 0.0, 0.0, method)
    P = single_hopf_numbers(ell, sigma, b).P
    try:
        analytic = hopf_prediction(beta, P)[0]
    except (WrongSide, ZeroDivisionError):
        analytic = math.nan
    opts = {} if manifold_at is None else {"manifold_at": manifold_at}
    system = make_system(method, p, **opts)
    direction = "forward" if beta.real > 0 else "backward"
    try:
        bracket = bracket or scan_bracket(system, direction)
        numeric = radius_by_binary_search(system, bracket=bracket, direction=direction)
    except (BracketInvalid, NoCycleFound, NonFiniteState, StepSizeUnderflow):
        numeric = math.nan
    return RadiusRow(lam, numeric, analytic, method)


def scan_bracket(system, direction: str, r_min: float = 1e-3, r_max: float = 20.0,
                 factor: float = 1.5) -> tuple[float, float]:
    """First geometric-grid interval on which the return excess changes sign.

    Grid points where the return map fails (escape, no return) end the scan.
    """
    r = r_min
    prev = return_map(system, r, direction) - r
    while r * factor <= r_max:
        nxt = r * factor
        try:
            cur = return_map(system, nxt, direction) - nxt
        except (NoCycleFound, NonFiniteState, StepSizeUnderflow):
            break
        if np.sign(cur) != np.sign(prev):
            return r, nxt
        r, prev = nxt, cur
    raise BracketInvalid(f"return excess keeps one sign on [{r_min:g}, {r:g}]")


def radius_scan(
    ell: float,
    sigma: float,
    b: float,
    lambdas: Iterable[float],
    method: str = "planar-cubic",
    bracket: Optional[tuple[float, float]] = None,
    manifold_at: Optional[str] = None,
    threads: Optional[int] = None,
) -> list[RadiusRow]:
    """Numeric cycle radius of a planar reduced field against the Hopf amplitude.

    Without an explicit ``bracket`` one is found by ``scan_bracket``.
    Failed searches are recorded as NaN in ``radius_numeric``; lambda on the
    wrong side of lambda0 for the analytic law gives NaN in ``radius_analytic``.
    """
    method = SystemKind(method).value
    if method not in (SystemKind.PLANAR_CUBIC.value, SystemKind.PLANAR_FULL_PROJECTION.value):
        raise InvalidParameters(f"radius scans need a planar method, got {method!r}")
    if analyze(ell).partition_class is not PartitionClass.I2:
        raise WrongClass("radius scans need an I2 length")
    lambdas = [float(x) for x in lambdas]
    with ThreadPoolExecutor(max_workers=threads or thread_count()) as pool:
        return list(pool.map(
            lambda lam: _radius_row(ell, sigma, b, lam, method, bracket, manifold_at), lambdas
        ))


def write_radius_scan_csv(rows: Iterable[RadiusRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("lambda", "radius_numeric", "radius_analytic", "method"))
        for r in rows:
            w.writerow((f"{r.lam:.17g}", f"{r.radius_numeric:.17g}",
                        f"{r.radius_analytic:.17g}", r.method))


def stderr_progress(done: int, total: int) -> None:
    print(f"\r{done}/{total} sigma rows", end="\n" if done == total else "", file=sys.stderr)
