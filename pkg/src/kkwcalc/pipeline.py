"""Boundary term of the residue of ``pi+(nabla_X nabla_Y D^-2) o pi+(D^-2)``.

The boundary integrand is a finite sum over ``(r, l, alpha, j, k)`` with
``r + l - k - j - |alpha| = -3``, ``r <= 0`` and ``l <= -2``.  Each
surviving term is evaluated exactly: jets and derivatives on the full
symbols, restriction to ``|xi'| = 1``, the plus-projection, the spinor
trace, a contour integral around ``xi_n = i`` and sphere moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .boundary import NonDecaying, contour_gamma_plus, pi_plus, sphere_integrate
from .clifford import rep_dim
from .geometry import (
    CollarJet,
    VectorFieldJet,
    build_dsq_inverse_symbols,
    build_einstein_symbol,
    collar_jets,
)
from .scalar import (
    G_XTYT,
    G_XY,
    HP0,
    PI,
    RIC_XY,
    SCALAR_S,
    ExactScalar,
    GaussQ,
    ZERO,
)
from .symbols import (
    GradedSymbol,
    LineSymbol,
    _alpha_factorial,
    _multi_indices,
    sym_deriv_x,
    sym_deriv_xi,
    sym_deriv_xn,
    sym_restrict,
)

__all__ = [
    "CaseOutOfRange",
    "BoundaryCase",
    "PhiResult",
    "DiffRow",
    "TheoremReport",
    "enumerate_cases",
    "boundary_cases",
    "compute_phi_case",
    "compute_all_phi",
    "bilinear_table",
    "interior_coefficients",
    "interior_part",
    "assemble_theorem",
    "REFERENCE_VALUES",
    "OMEGA_READINGS",
    "diff_vs_reference",
    "reference_consistency",
    "CASES",
    "case_integrand",
    "render_bilinear",
    "tangential_trace",
]


class CaseOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class BoundaryCase:
    """One term ``(r, l, |alpha|, j, k)`` of the boundary sum."""

    index: int
    r: int
    l: int
    alpha: int
    j: int
    k: int

    def prefactor(self) -> GaussQ:
        """``(-i)^(|alpha|+j+k+1) / (j+k+1)!``; the ``1/alpha!`` goes with each multi-index."""
        return GaussQ(0, -1) ** (self.alpha + self.j + self.k + 1) / factorial(self.j + self.k + 1)

    def describe(self) -> str:
        return f"r={self.r}, l={self.l}, |alpha|={self.alpha}, j={self.j}, k={self.k}"


def enumerate_cases(p_orders, q_orders, total: int = -3) -> list:
    """All ``(r, l, |alpha|, j, k)`` with ``r + l - k - j - |alpha| = total``.

    Ordered by ``r`` then ``l`` descending, then tangential derivatives
    first, ``x_n`` derivatives next and ``xi_n`` derivatives last.
    """
    out = []
    for r in sorted((o for o in p_orders if o <= 0), reverse=True):
        for l in sorted((o for o in q_orders if o <= -2), reverse=True):
            budget = r + l - total
            if budget < 0:
                continue
            triples = [
                (a, j, budget - a - j)
                for a in range(budget + 1)
                for j in range(budget - a + 1)
            ]
            triples.sort(reverse=True)
            for a, j, k in triples:
                out.append(BoundaryCase(len(out) + 1, r, l, a, j, k))
    return out


def boundary_cases() -> tuple:
    """The five cases available at orders ``{0, -1}`` x ``{-2, -3}``."""
    cases = enumerate_cases((0, -1), (-2, -3))
    if len(cases) != 5:
        raise AssertionError(f"expected five boundary cases, found {len(cases)}")
    return tuple(cases)


CASES = boundary_cases()


def _case(index: int) -> BoundaryCase:
    if not 1 <= index <= len(CASES):
        raise CaseOutOfRange(f"case must be in 1..{len(CASES)}, got {index}")
    return CASES[index - 1]


# ---------------------------------------------------------------------------
# Bilinear tables
# ---------------------------------------------------------------------------


def _field_part(mono):
    fields, rest = [], []
    for g, p in mono:
        (fields if g.tag in ("X", "Y", "DY") else rest).append((g, p))
    return tuple(fields), tuple(rest)


def _table_key(fields, n: int) -> str:
    flat = []
    for g, p in fields:
        flat.extend([g] * p)
    xs = [g for g in flat if g.tag == "X"]
    ys = [g for g in flat if g.tag in ("Y", "DY")]
    if len(xs) != 1 or len(ys) != 1:
        raise ValueError(f"not bilinear in (X, Y): {[g.name for g in flat]}")
    j, y = xs[0].idx[0], ys[0]
    if y.tag == "DY":
        a, b = y.idx
        return f"XdY({j},{a},{b})"
    l = y.idx[0]
    if j < n and l < n:
        return f"T({j},{l})"
    if j == n and l == n:
        return "N"
    if j < n:
        return f"XT_YN({j})"
    return f"XN_YT({l})"


def bilinear_table(expr: ExactScalar, n: int = 4) -> dict:
    """Split a bilinear expression into coefficients keyed by field pairing.

    Keys: ``T(j,l)`` for ``X_j Y_l`` with ``j, l < n``, ``N`` for
    ``X_n Y_n``, ``XT_YN(j)``, ``XN_YT(l)`` for mixed pairs and
    ``XdY(k,j,l)`` for ``X_k dY_l/dx_j``.  Zero coefficients are dropped.
    """
    out: dict = {}
    for mono, coef in expr.terms.items():
        fields, rest = _field_part(mono)
        key = _table_key(fields, n)
        piece = ExactScalar._raw({rest: coef})
        out[key] = out[key] + piece if key in out else piece
    return {k: v for k, v in out.items() if v}


def tangential_trace(table: dict, n: int = 4) -> ExactScalar | None:
    """Common diagonal coefficient when the tangential block is ``c * delta_jl``."""
    diag = [table.get(f"T({j},{j})", ZERO) for j in range(1, n)]
    off = [
        k for k in table
        if k.startswith("T(") and k.split("(")[1].split(",")[0] != k.split(",")[1].rstrip(")")
    ]
    if off or any(d != diag[0] for d in diag):
        return None
    return diag[0]


def render_bilinear(table: dict, n: int = 4) -> ExactScalar:
    """Re-express a table using ``g(X^T, Y^T)`` when the tangential block is diagonal."""
    expr = ZERO
    t = tangential_trace(table, n)
    for key, coef in table.items():
        if key.startswith("T(") and t is not None:
            continue
        expr = expr + coef * _key_monomial(key, n)
    if t is not None and t:
        expr = expr + t * ExactScalar.gen(G_XTYT)
    return expr


def _key_monomial(key: str, n: int) -> ExactScalar:
    from .scalar import DY, X, Y

    name, _, args = key.partition("(")
    idx = [int(a) for a in args.rstrip(")").split(",")] if args else []
    if name == "T":
        return ExactScalar.gen(X(idx[0])) * ExactScalar.gen(Y(idx[1]))
    if name == "N":
        return ExactScalar.gen(X(n)) * ExactScalar.gen(Y(n))
    if name == "XT_YN":
        return ExactScalar.gen(X(idx[0])) * ExactScalar.gen(Y(n))
    if name == "XN_YT":
        return ExactScalar.gen(X(n)) * ExactScalar.gen(Y(idx[0]))
    if name == "XdY":
        return ExactScalar.gen(X(idx[0])) * ExactScalar.gen(DY(idx[1], idx[2]))
    raise ValueError(f"unknown table key {key!r}")


# ---------------------------------------------------------------------------
# Boundary cases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhiResult:
    """Exact value of one boundary case.

    ``total`` is the full expression in ``hp0``, ``pi`` and the field
    generators; ``table`` is its bilinear split.
    """

    case: BoundaryCase
    total: ExactScalar
    table: dict = field(default_factory=dict)

    @property
    def index(self) -> int:
        return self.case.index

    def rendered(self) -> ExactScalar:
        return render_bilinear(self.table)


def _left_factor(sym, case: BoundaryCase, combo) -> LineSymbol:
    s = sym
    for _ in range(case.j):
        s = sym_deriv_xn(s)
    for axis in combo:
        s = sym_deriv_xi(s, axis)
    line = pi_plus(sym_restrict(s))
    return line.deriv_n(case.k)


def _right_factor(sym, case: BoundaryCase, combo) -> LineSymbol:
    s = sym
    for axis in combo:
        s = sym_deriv_x(s, axis)
    for _ in range(case.k):
        s = sym_deriv_xn(s)
    return sym_restrict(s).deriv_n(case.j + 1)


def case_integrand(case: BoundaryCase, P: GradedSymbol, Q: GradedSymbol, combo=()) -> LineSymbol:
    """Traced ``xi_n``-integrand of one case for a single tangential multi-index."""
    n = P.n
    prod = _left_factor(P[case.r], case, combo) * _right_factor(Q[case.l], case, combo)
    return prod.trace(rep_dim(n))


def _phi_from_symbols(case: BoundaryCase, P: GradedSymbol, Q: GradedSymbol) -> ExactScalar:
    n = P.n
    combos = list(_multi_indices(n - 1, case.alpha))
    pref = ExactScalar.const(case.prefactor())
    total = ZERO
    for combo in combos:
        f = case_integrand(case, P, Q, combo)
        if f.is_zero():
            continue
        if f.numerator_degree() > f.a + f.b - 2:
            raise NonDecaying(f"case {case.index}: integrand decays too slowly on the real line")
        moments = sphere_integrate(contour_gamma_plus(f))
        value = moments.get(0, ZERO)
        total = total + value * pref * Fraction(1, _alpha_factorial(combo))
    return total


def _default_fields(n: int, derivatives: bool):
    return (
        VectorFieldJet.formal("X", n),
        VectorFieldJet.formal("Y", n, tangential_derivatives=derivatives),
    )


def compute_phi_case(
    case: int,
    X: VectorFieldJet | None = None,
    Y: VectorFieldJet | None = None,
    jets: CollarJet | None = None,
    reading: str = "derived",
) -> PhiResult:
    """Exact value of boundary case ``case`` (1..5).

    Omitted fields default to formal vector fields; omitted jets default
    to the four-dimensional collar with generator ``hp0``.
    """
    bc = _case(case)
    jets = collar_jets(4) if jets is None else jets
    if jets.n != 4:
        raise ValueError("boundary cases are evaluated at n = 4")
    if X is None or Y is None:
        dx, dy = _default_fields(jets.n, False)
        X = dx if X is None else X
        Y = dy if Y is None else Y
    P = build_einstein_symbol(X, Y, jets, reading)
    Q = build_dsq_inverse_symbols(jets)
    total = _phi_from_symbols(bc, P, Q)
    return PhiResult(bc, total, bilinear_table(total, jets.n) if _is_formal(total) else {})


def _is_formal(expr: ExactScalar) -> bool:
    try:
        bilinear_table(expr)
    except ValueError:
        return False
    return True


def compute_all_phi(
    X: VectorFieldJet | None = None,
    Y: VectorFieldJet | None = None,
    jets: CollarJet | None = None,
    reading: str = "derived",
    field_derivatives: bool = False,
) -> list:
    """All five cases sharing one composition."""
    jets = collar_jets(4) if jets is None else jets
    if X is None or Y is None:
        dx, dy = _default_fields(jets.n, field_derivatives)
        X = dx if X is None else X
        Y = dy if Y is None else Y
    P = build_einstein_symbol(X, Y, jets, reading)
    Q = build_dsq_inverse_symbols(jets)
    out = []
    for bc in CASES:
        total = _phi_from_symbols(bc, P, Q)
        out.append(PhiResult(bc, total, bilinear_table(total, jets.n) if _is_formal(total) else {}))
    return out


# ---------------------------------------------------------------------------
# Interior part and the assembled statement
# ---------------------------------------------------------------------------


def interior_coefficients(n: int = 4) -> tuple:
    """``(2 pi)^(n/2) / (3 (n/2-1)!)`` and ``(2 pi)^(n/2) / (4 (n/2-1)!)``."""
    if n % 2 or n < 2:
        raise ValueError("interior coefficients need even n >= 2")
    h = n // 2
    base = ExactScalar.gen(PI, h) * (2**h)
    return base * Fraction(1, 3 * factorial(h - 1)), base * Fraction(1, 4 * factorial(h - 1))


def interior_part(n: int = 4) -> ExactScalar:
    """``c1 [Ric(X,Y) - s g(X,Y)/2] + c2 s g(X,Y)`` with opaque curvature generators."""
    c1, c2 = interior_coefficients(n)
    ric = ExactScalar.gen(RIC_XY)
    sg = ExactScalar.gen(SCALAR_S) * ExactScalar.gen(G_XY)
    return c1 * (ric - sg * Fraction(1, 2)) + c2 * sg


# Reference boundary coefficients.  Each entry is the coefficient ``c`` in
# ``c * h'(0) * pi^p * Omega`` multiplying either sum_j X_j Y_j (tangential)
# or X_n Y_n (normal).
REFERENCE_VALUES = (
    {"row": "phi1", "case": 1, "slot": "tangential", "value": "0", "pi_power": 1},
    {"row": "phi1", "case": 1, "slot": "normal", "value": "0", "pi_power": 1},
    {"row": "phi2", "case": 2, "slot": "tangential", "value": "13/24*pi", "pi_power": 1},
    {"row": "phi2", "case": 2, "slot": "normal", "value": "13/32", "pi_power": 1},
    {"row": "phi3", "case": 3, "slot": "tangential", "value": "5/12*pi", "pi_power": 1},
    {"row": "phi3", "case": 3, "slot": "normal", "value": "5*I/16", "pi_power": 1},
    {"row": "phi4", "case": 4, "slot": "tangential", "value": "(1 - 5*I)/12*pi", "pi_power": 1},
    {"row": "phi4", "case": 4, "slot": "normal", "value": "11*I/16", "pi_power": 1},
    {"row": "phi5", "case": 5, "slot": "tangential", "value": "-1/2", "pi_power": 2},
    {"row": "total", "case": None, "slot": "tangential", "value": "(13 - 10*I)/24*pi", "pi_power": 1},
    {"row": "total", "case": None, "slot": "normal", "value": "(13 + 32*I)/32", "pi_power": 1},
)

# Two readings of the sphere-volume symbol in the reference normalization:
# the volume of S^3 and the volume of the integration sphere S^2.
OMEGA_READINGS = {
    "vol_S3": ExactScalar.gen(PI, 2) * 2,
    "vol_S2": ExactScalar.gen(PI) * 4,
}


def _slot_value(table: dict, slot: str) -> ExactScalar:
    """Coefficient of ``X_j Y_j`` (the tangential block is diagonal) or of ``X_n Y_n``."""
    if slot == "tangential":
        return table.get("T(1,1)", ZERO)
    return table.get("N", ZERO)


@dataclass(frozen=True)
class DiffRow:
    row: str
    slot: str
    engine: ExactScalar
    reference: ExactScalar
    reference_coefficient: str
    verdict: str
    matched_readings: tuple
    candidates: dict
    oracle: dict | None = None

    @property
    def is_match(self) -> bool:
        return self.verdict == "MATCH"


def diff_vs_reference(results: list, oracle_values: dict | None = None) -> list:
    """Per-coefficient comparison with the reference boundary values.

    ``oracle_values`` maps ``(row, slot)`` to an independent numeric value
    of the engine coefficient at ``h'(0) = 1``; mismatching rows are then
    adjudicated by distance to the engine and to each reference reading.
    """
    by_case = {r.index: r for r in results}
    summed: dict = {}
    for r in results:
        for k, v in r.table.items():
            summed[k] = summed[k] + v if k in summed else v
    hp = ExactScalar.gen(HP0)
    rows = []
    for entry in REFERENCE_VALUES:
        table = summed if entry["case"] is None else by_case[entry["case"]].table
        engine = _slot_value(table, entry["slot"])
        coef = ExactScalar.parse(entry["value"])
        base = coef * hp * ExactScalar.gen(PI, entry["pi_power"])
        candidates = {}
        for name, omega in OMEGA_READINGS.items():
            candidates[name] = base * omega
        matched = tuple(name for name, v in candidates.items() if v == engine)
        verdict = "MATCH" if matched else "MISMATCH"
        oracle = None
        key = (entry["row"], entry["slot"])
        if oracle_values is not None and key in oracle_values:
            oracle = _adjudicate(oracle_values[key], engine, candidates)
        rows.append(
            DiffRow(
                entry["row"],
                entry["slot"],
                engine,
                base,
                entry["value"],
                verdict,
                matched,
                candidates,
                oracle,
            )
        )
    return rows


def reference_consistency() -> dict:
    """Whether the reference total equals the sum of the reference case rows, per slot."""
    out = {}
    for slot in ("tangential", "normal"):
        rows = [e for e in REFERENCE_VALUES if e["slot"] == slot]
        as_expr = [ExactScalar.parse(e["value"]) * ExactScalar.gen(PI, e["pi_power"]) for e in rows]
        parts = sum((x for e, x in zip(rows, as_expr) if e["case"] is not None), ZERO)
        total = next(x for e, x in zip(rows, as_expr) if e["case"] is None)
        out[slot] = (parts, total, parts == total)
    return out


def _numeric(expr: ExactScalar) -> complex:
    return expr.evaluate({PI: math.pi, HP0: 1.0})


def _adjudicate(value: complex, engine: ExactScalar, candidates: dict, tol: float = 1e-7) -> dict:
    e = _numeric(engine)
    scale = max(abs(value), abs(e), 1.0)
    out = {
        "oracle": value,
        "engine_residual": abs(value - e) / scale,
        "supports_engine": abs(value - e) <= tol * scale,
        "supports_reference": [],
    }
    for name, cand in candidates.items():
        c = _numeric(cand)
        if abs(value - c) <= tol * max(abs(value), abs(c), 1.0):
            out["supports_reference"].append(name)
    if out["supports_engine"]:
        out["verdict"] = "engine"
    elif out["supports_reference"]:
        out["verdict"] = "reference"
    else:
        out["verdict"] = "neither"
    return out


@dataclass
class TheoremReport:
    """Interior coefficients, boundary cases and their assembled sum."""

    interior: ExactScalar
    interior_coefficients: tuple
    phi: list
    boundary_table: dict
    boundary: ExactScalar
    diff: list
    reading: str = "derived"

    def statement(self) -> ExactScalar:
        return self.interior + self.boundary


def assemble_theorem(
    X: VectorFieldJet | None = None,
    Y: VectorFieldJet | None = None,
    reading: str = "derived",
    oracle_values: dict | None = None,
    field_derivatives: bool = False,
) -> TheoremReport:
    phi = compute_all_phi(X, Y, reading=reading, field_derivatives=field_derivatives)
    table: dict = {}
    total = ZERO
    for r in phi:
        total = total + r.total
        for k, v in r.table.items():
            table[k] = table[k] + v if k in table else v
    table = {k: v for k, v in table.items() if v}
    return TheoremReport(
        interior=interior_part(4),
        interior_coefficients=interior_coefficients(4),
        phi=phi,
        boundary_table=table,
        boundary=render_bilinear(table) if table or not total else total,
        diff=diff_vs_reference(phi, oracle_values) if all(r.table or not r.total for r in phi) else [],
        reading=reading,
    )

