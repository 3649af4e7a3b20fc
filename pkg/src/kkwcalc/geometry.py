"""Collar-metric jets and the symbol constructors built from them.

Near the boundary the metric is ``g = h(x_n)^{-1} g_boundary + dx_n^2`` with
``h(0) = 1``.  At the boundary point ``x0`` we use boundary normal
coordinates, so ``g_ij(x0) = delta_ij``, tangential first derivatives vanish
and the only first-order datum is ``h'(0)`` (the generator ``hp0``).  The
orthonormal frame is ``e_j = sqrt(h) d_j`` for ``j < n`` and ``e_n = d_n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .clifford import CliffordElement, c
from .scalar import DY, HP0, I, ExactScalar, ONE, ZERO, X, Y
from .symbols import CPoly, FullSymbol, GradedSymbol, Rat, sym_compose

__all__ = [
    "CollarJet",
    "VectorFieldJet",
    "collar_jets",
    "build_nabla_symbols",
    "build_dsq_inverse_symbols",
    "build_dirac_symbols",
    "build_einstein_symbol",
]

def _zeros(*shape):
    if len(shape) == 1:
        return [ZERO] * shape[0]
    return [_zeros(*shape[1:]) for _ in range(shape[0])]


def _freeze(table):
    if isinstance(table, list):
        return tuple(_freeze(t) for t in table)
    return table


@dataclass(frozen=True)
class CollarJet:
    """First-order geometric data at the boundary point (0-based tables).

    ``dg[a][i][j]``      d_a g_ij
    ``dginv[a][i][j]``   d_a g^ij
    ``christoffel[k][i][j]``  Gamma^k_ij
    ``dframe[a][t][b]``  d_a of the b-th coordinate component of e_t
    ``omega[s][t][i]``   omega_{s,t}(e_i) = <nabla_{e_i} e_t, e_s>
    ``sigma[i]``         -1/4 sum omega_{s,t}(e_i) c(e_s) c(e_t)
    ``gamma_up[k]``      g^ij Gamma^k_ij
    ``sigma_up[k]``      g^ik sigma_i
    """

    n: int
    g: tuple
    dg: tuple
    dginv: tuple
    christoffel: tuple
    frame: tuple
    dframe: tuple
    omega: tuple
    sigma: tuple
    gamma_up: tuple
    sigma_up: tuple

    def spin_connection(self, v) -> CliffordElement:
        """``A(V) = 1/4 sum <nabla_V e_i, e_j> c(e_i) c(e_j)`` for coordinate components ``v``."""
        n = self.n
        out = CliffordElement(n)
        for i in range(n):
            for j in range(n):
                coef = ZERO
                for a in range(n):
                    if not v[a]:
                        continue
                    # <nabla_{d_a} e_i, e_j> = omega_{j,i}(d_a); d_a = e_a at x0
                    coef = coef + ExactScalar.coerce(v[a]) * self.omega[j][i][a]
                if coef:
                    out = out + (c(n, i + 1) * c(n, j + 1)).scale(coef * Fraction(1, 4))
        return out

    def is_flat(self) -> bool:
        return all(not x for row in self.dg for col in row for x in col)


def collar_jets(n: int = 4, hp0: ExactScalar | None = None) -> CollarJet:
    """Christoffels, connection forms and spin connection at ``x0``.

    ``hp0`` replaces the generator ``h'(0)`` (e.g. ``0`` for the product case).
    """
    if n < 3:
        raise ValueError("collar jets need n >= 3")
    hp = ExactScalar.gen(HP0) if hp0 is None else ExactScalar.coerce(hp0)
    N = n - 1  # 0-based index of the normal direction
    g = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    ginv = g
    dg = _zeros(n, n, n)
    for i in range(N):
        dg[N][i][i] = -hp  # d/dx_n (1/h) at 0
    dginv = _zeros(n, n, n)
    for a in range(n):
        for i in range(n):
            for j in range(n):
                acc = ZERO
                for p in range(n):
                    for q in range(n):
                        if ginv[i][p] and ginv[q][j] and dg[a][p][q]:
                            acc = acc - ginv[i][p] * dg[a][p][q] * ginv[q][j]
                dginv[a][i][j] = acc
    chris = _zeros(n, n, n)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                acc = ZERO
                for l in range(n):
                    if not ginv[k][l]:
                        continue
                    t = dg[i][j][l] + dg[j][i][l] - dg[l][i][j]
                    if t:
                        acc = acc + ginv[k][l] * t * Fraction(1, 2)
                chris[k][i][j] = acc
    frame = [[ONE if a == b else ZERO for b in range(n)] for a in range(n)]
    dframe = _zeros(n, n, n)
    for t in range(N):
        dframe[N][t][t] = hp * Fraction(1, 2)  # d/dx_n sqrt(h) at 0
    # nabla_{e_i} e_t, coordinate components
    nab = _zeros(n, n, n)
    for i in range(n):
        for t in range(n):
            for b in range(n):
                acc = ZERO
                for a in range(n):
                    if not frame[i][a]:
                        continue
                    inner = dframe[a][t][b]
                    for d in range(n):
                        if frame[t][d] and chris[b][a][d]:
                            inner = inner + chris[b][a][d] * frame[t][d]
                    if inner:
                        acc = acc + frame[i][a] * inner
                nab[i][t][b] = acc
    omega = _zeros(n, n, n)
    for s in range(n):
        for t in range(n):
            for i in range(n):
                acc = ZERO
                for b in range(n):
                    for d in range(n):
                        if nab[i][t][b] and g[b][d] and frame[s][d]:
                            acc = acc + nab[i][t][b] * g[b][d] * frame[s][d]
                omega[s][t][i] = acc
    sigma = []
    for i in range(n):
        el = CliffordElement(n)
        for s in range(n):
            for t in range(n):
                if omega[s][t][i]:
                    el = el + (c(n, s + 1) * c(n, t + 1)).scale(omega[s][t][i] * Fraction(-1, 4))
        sigma.append(el)
    gamma_up = []
    for k in range(n):
        acc = ZERO
        for i in range(n):
            for j in range(n):
                if ginv[i][j] and chris[k][i][j]:
                    acc = acc + ginv[i][j] * chris[k][i][j]
        gamma_up.append(acc)
    sigma_up = []
    for k in range(n):
        el = CliffordElement(n)
        for i in range(n):
            if ginv[i][k]:
                el = el + sigma[i].scale(ginv[i][k])
        sigma_up.append(el)
    return CollarJet(
        n=n,
        g=_freeze(g),
        dg=_freeze(dg),
        dginv=_freeze(dginv),
        christoffel=_freeze(chris),
        frame=_freeze(frame),
        dframe=_freeze(dframe),
        omega=_freeze(omega),
        sigma=tuple(sigma),
        gamma_up=tuple(gamma_up),
        sigma_up=tuple(sigma_up),
    )


@dataclass(frozen=True)
class VectorFieldJet:
    """Coordinate components of a vector field at ``x0`` and optional derivative jets.

    ``derivatives[j][l]`` is ``d_j V_l`` (0-based).  Only tangential
    derivatives (``j < n``) are modelled; the normal derivative is zero,
    matching the collar convention that ``x_n``-dependence enters only
    through ``h``.
    """

    components: tuple
    derivatives: tuple | None = None

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def has_derivatives(self) -> bool:
        return self.derivatives is not None

    @classmethod
    def formal(cls, name: str, n: int = 4, tangential_derivatives: bool = False) -> "VectorFieldJet":
        gen = {"X": X, "Y": Y}[name]
        comps = tuple(ExactScalar.gen(gen(j)) for j in range(1, n + 1))
        ders = None
        if tangential_derivatives:
            if name != "Y":
                raise ValueError("derivative jets are carried for Y only")
            ders = tuple(
                tuple(ExactScalar.gen(DY(j, l)) if j < n else ZERO for l in range(1, n + 1))
                for j in range(1, n + 1)
            )
        return cls(comps, ders)

    @classmethod
    def constant(cls, values) -> "VectorFieldJet":
        return cls(tuple(ExactScalar.coerce(v) for v in values))

    @classmethod
    def zero(cls, n: int = 4) -> "VectorFieldJet":
        return cls((ZERO,) * n)

    def scaled(self, lam) -> "VectorFieldJet":
        lam = ExactScalar.coerce(lam)
        ders = None
        if self.derivatives is not None:
            ders = tuple(tuple(d * lam for d in row) for row in self.derivatives)
        return VectorFieldJet(tuple(v * lam for v in self.components), ders)

    def xi_pairing(self) -> CPoly:
        """``sum_j V_j xi_j``."""
        out = CPoly.zero(self.n)
        for j, v in enumerate(self.components, start=1):
            if v:
                out = out + CPoly.xi(self.n, j).scale(v)
        return out


READINGS = ("derived", "printed")


def build_nabla_symbols(
    Xf: VectorFieldJet, Yf: VectorFieldJet, jets: CollarJet, reading: str = "derived"
) -> GradedSymbol:
    """Symbol of ``nabla_X nabla_Y`` on spinors, orders 2, 1, 0.

    From ``(X + A(X))(Y + A(Y)) = XY + X[A(Y)] + A(Y)X + A(X)Y + A(X)A(Y)``
    with ``d_j -> i xi_j``.  ``reading="printed"`` uses ``A(Y) Y_l xi_l`` in
    place of ``A(X) Y_l xi_l`` in the first-order part.

    The order-0 part omits ``X_k Y_l d_k A(d_l)``, which needs second
    metric jets; it is marked partial.
    """
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}")
    n = jets.n
    if Xf.n != n or Yf.n != n:
        raise ValueError("vector fields and jets disagree on n")
    flat = not (Xf.has_derivatives or Yf.has_derivatives)
    xx, yy = Xf.xi_pairing(), Yf.xi_pairing()
    s2 = FullSymbol(Rat(-(xx * yy), 0), Rat.zero(n), flat)

    AX = jets.spin_connection(Xf.components)
    AY = jets.spin_connection(Yf.components)
    second = AX if reading == "derived" else AY
    p1 = CPoly.from_clifford(AY) * xx + CPoly.from_clifford(second) * yy
    if Yf.has_derivatives:
        for j in range(n):
            for l in range(n):
                coef = Xf.components[j] * Yf.derivatives[j][l]
                if coef:
                    p1 = p1 + CPoly.xi(n, l + 1).scale(coef)
    s1 = FullSymbol(Rat(p1.scale(I), 0), None, flat)

    p0 = CPoly.from_clifford(AX * AY)
    if Yf.has_derivatives:
        # X_k (d_k Y_l) A(d_l)
        for l in range(n):
            w = ZERO
            for k in range(n):
                w = w + Xf.components[k] * Yf.derivatives[k][l]
            if w:
                unit = [ZERO] * n
                unit[l] = ONE
                p0 = p0 + CPoly.from_clifford(jets.spin_connection(unit)).scale(w)
    s0 = FullSymbol(Rat(p0, 0), None, flat)
    return GradedSymbol(n, {2: s2, 1: s1, 0: s0}, partial=(0,))


def build_dsq_inverse_symbols(jets: CollarJet) -> GradedSymbol:
    """``sigma_{-2}`` and ``sigma_{-3}`` of ``D^{-2}`` at ``x0``.

    ``sigma_{-2} = |xi|^{-2}`` and
    ``sigma_{-3} = -i |xi|^{-4} xi_k (Gamma^k - 2 sigma^k)
    - 2i |xi|^{-6} xi^j xi_a xi_b d_j g^{ab}``.
    """
    n = jets.n
    N = n - 1
    quad_d = CPoly.zero(n)  # d_n g^{ab} xi_a xi_b
    for a in range(n):
        for b in range(n):
            coef = jets.dginv[N][a][b]
            if coef:
                quad_d = quad_d + (CPoly.xi(n, a + 1) * CPoly.xi(n, b + 1)).scale(coef)
    s2 = FullSymbol(Rat(CPoly.const(n, 1), 1), Rat(-quad_d, 2), True)

    lin = CPoly.zero(n)
    for k in range(n):
        block = CliffordElement.scalar(n, jets.gamma_up[k]) - jets.sigma_up[k].scale(2)
        if block:
            lin = lin + CPoly.xi(n, k + 1) * CPoly.from_clifford(block)
    term1 = Rat(lin.scale(-I), 2)
    cubic = CPoly.zero(n)
    for j in range(n):
        xi_up = CPoly.zero(n)
        for i in range(n):
            if jets.g[i][j]:
                xi_up = xi_up + CPoly.xi(n, i + 1).scale(jets.g[i][j])
        for a in range(n):
            for b in range(n):
                coef = jets.dginv[j][a][b]
                if coef:
                    cubic = cubic + (xi_up * CPoly.xi(n, a + 1) * CPoly.xi(n, b + 1)).scale(coef)
    term2 = Rat(cubic.scale(I * -2), 3)
    s3 = FullSymbol(term1 + term2, None, True)
    return GradedSymbol(n, {-2: s2, -3: s3})


def build_dirac_symbols(jets: CollarJet) -> GradedSymbol:
    """``sigma(D) = p_1 + p_0`` with ``p_1 = i c(e_a) e_a^b xi_b`` and ``p_0 = c(e_a) sigma_a``."""
    n = jets.n
    N = n - 1
    p1 = CPoly.zero(n)
    dp1 = CPoly.zero(n)
    for a in range(n):
        ca = CPoly.from_clifford(c(n, a + 1))
        for b in range(n):
            if jets.frame[a][b]:
                p1 = p1 + (ca * CPoly.xi(n, b + 1)).scale(jets.frame[a][b])
            if jets.dframe[N][a][b]:
                dp1 = dp1 + (ca * CPoly.xi(n, b + 1)).scale(jets.dframe[N][a][b])
    s1 = FullSymbol(Rat(p1.scale(I), 0), Rat(dp1.scale(I), 0), True)
    p0 = CliffordElement(n)
    for a in range(n):
        p0 = p0 + c(n, a + 1) * jets.sigma[a]
    s0 = FullSymbol(Rat(CPoly.from_clifford(p0), 0), None, True)
    return GradedSymbol(n, {1: s1, 0: s0})


def build_einstein_symbol(
    Xf: VectorFieldJet, Yf: VectorFieldJet, jets: CollarJet, reading: str = "derived"
) -> GradedSymbol:
    """Orders 0 and -1 of ``sigma(nabla_X nabla_Y D^{-2})``."""
    return sym_compose(
        build_nabla_symbols(Xf, Yf, jets, reading), build_dsq_inverse_symbols(jets), -1
    )
