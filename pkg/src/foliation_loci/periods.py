"""Residue pairing, symplectic normalisation and numeric periods.

Exact side: forms are expanded at the point at infinity in the parameter
``t`` with ``x = t^-2`` and ``y = t^-(2g+1) (1 + ...)``.  All stored pairings
are residues, i.e. intersection pairings divided by ``2 pi i``.

Numeric side: loops around consecutive branch points, Gauss-Legendre panels
with adaptive halving, and an integral symplectic change of cycles recovered
from the exact pairing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .algebra import eval_poly, eval_rf, format_rational
from .connection import (
    ConnectionMatrix,
    format_matrix,
    is_zero_matrix,
    mat_add,
    mat_det,
    mat_diff,
    mat_identity,
    mat_inverse,
    mat_mul,
    mat_scale,
    mat_sub,
    mat_zero,
    transpose,
)
from .errors import (
    BranchPointCollision,
    DegeneratePairing,
    FamilyError,
    NotSecondKind,
    PeriodIntegrationError,
    SingularBBlock,
    TruncationTooSmall,
)
from .gauss_manin import (
    DeRhamForm,
    HyperellipticFamily,
    derham_basis,
    derivative_forms,
    gauss_manin_matrix,
    griffiths_dwork_reduce,
)
from .series import LaurentSeries, power_series_inverse, power_series_sqrt

# ------------------------------------------------------------------ expansions


def _form_valuation(form: DeRhamForm, fam: HyperellipticFamily) -> int:
    deg = max((i for i, c in enumerate(form.num) if c), default=0)
    return fam.degree * form.pole - 3 - 2 * deg


def expansion_at_infinity(form: DeRhamForm, fam: HyperellipticFamily, order: int) -> LaurentSeries:
    """The ``dt`` coefficient of ``form`` at infinity, known for exponents ``< order``."""
    K = fam.field
    if not any(form.num):
        return LaurentSeries("t", order - 1, (K.zero,), order)
    v = _form_valuation(form, fam)
    if order < -v:
        raise TruncationTooSmall(f"order {order} is below the pole order {-v}")
    d = fam.degree
    m = form.pole
    nterms = max((order - v + 1) // 2, 1)
    f = fam.x_coeffs
    # y^2 = t^(-2d) u(t^2), u_k = f_(d-k)
    u = [f[d - k] if k <= d else K.zero for k in range(nterms)]
    w = power_series_sqrt(u, nterms)
    wm = [K.one] + [K.zero] * (nterms - 1)
    for _ in range(m):
        wm = _series_mul(wm, w, nterms)
    W = power_series_inverse(wm, nterms)
    terms: dict = {}
    # h(t^-2) * (-2 t^-3) * t^(dm) * W(t^2)
    for i, hi in enumerate(form.num):
        if not hi:
            continue
        base = d * m - 3 - 2 * i
        for k, wk in enumerate(W):
            e = base + 2 * k
            if e >= order:
                break
            if wk:
                terms[e] = terms.get(e, K.zero) - 2 * hi * wk
    return LaurentSeries.from_dict("t", terms, min(v, order - 1), order, K.zero)


def _series_mul(a, b, n):
    zero = a[0] * 0
    out = [zero] * n
    for i in range(n):
        if not a[i]:
            continue
        for j in range(n - i):
            out[i + j] = out[i + j] + a[i] * b[j]
    return out


def _reduced_form(form: DeRhamForm, fam: HyperellipticFamily) -> DeRhamForm:
    if form.pole == 1:
        return form
    return DeRhamForm(tuple(griffiths_dwork_reduce(form, fam)), 1)


def residue_pairing(omega: DeRhamForm, eta: DeRhamForm, fam: HyperellipticFamily):
    """``res_infinity(F eta)`` with ``F`` a formal primitive of ``omega``.

    Forms of higher pole order are first replaced by their reduced
    representatives, whose only pole is at infinity.
    """
    w = _reduced_form(omega, fam)
    e = _reduced_form(eta, fam)
    K = fam.field
    if not any(w.num) or not any(e.num):
        return K.zero
    vw = _form_valuation(w, fam)
    ve = _form_valuation(e, fam)
    order = max(-vw, -ve, 0) + 2
    sw = expansion_at_infinity(w, fam, order)
    se = expansion_at_infinity(e, fam, order)
    for s, name in ((sw, "omega"), (se, "eta")):
        if s.residue():
            raise NotSecondKind(f"{name} has residue {format_rational(s.residue())} at infinity")
    F = sw.integrate()
    return (F * se).residue()


@dataclass(frozen=True)
class PairingMatrix:
    base: tuple
    matrix: tuple  # rows of FracElement

    @property
    def genus(self) -> int:
        return len(self.matrix) // 2

    def rows(self) -> list:
        return [list(r) for r in self.matrix]

    def flatness_defect(self, conn: ConnectionMatrix) -> list:
        """``dLambda - Omega Lambda - Lambda Omega^T`` for each base variable."""
        L = self.rows()
        K = conn.field
        out = []
        for i, O in enumerate(conn.matrices):
            rhs = mat_add(mat_mul(O, L), mat_mul(L, transpose(O)))
            out.append(mat_sub(mat_diff(L, K.gens[i]), rhs))
        return out

    def to_json(self) -> dict:
        return {"base": list(self.base), "matrix": format_matrix(self.rows())}


def pairing_matrix(fam: HyperellipticFamily) -> PairingMatrix:
    basis = derham_basis(fam)
    n = len(basis)
    g = fam.genus
    K = fam.field
    L = mat_zero(K, n)
    for i in range(n):
        for j in range(i + 1, n):
            L[i][j] = residue_pairing(basis[i], basis[j], fam)
            L[j][i] = -L[i][j]
    for i in range(g):
        for j in range(g):
            if L[i][j]:
                raise DegeneratePairing("holomorphic block is not isotropic")
    if not mat_det(L, K):
        raise DegeneratePairing("pairing determinant vanishes identically")
    return PairingMatrix(fam.base, tuple(tuple(r) for r in L))


def standard_J(K, g: int) -> list:
    J = mat_zero(K, 2 * g)
    for i in range(g):
        J[i][g + i] = K.one
        J[g + i][i] = -K.one
    return J


@dataclass(frozen=True)
class NormalizedBasis:
    """Rows of ``M`` give the new forms in the old basis ``x^i dx/y``."""

    M: tuple
    connection: ConnectionMatrix

    def sp_defect(self) -> list:
        """``Omega'^T J + J Omega'`` per base variable."""
        K = self.connection.field
        g = len(self.M) // 2
        J = standard_J(K, g)
        return [mat_add(mat_mul(transpose(O), J), mat_mul(J, O)) for O in self.connection.matrices]

    def to_json(self) -> dict:
        return {"M": format_matrix([list(r) for r in self.M]), "omega": self.connection.to_json()["omega"]}


def symplectic_normalize(fam: HyperellipticFamily, pairing: PairingMatrix,
                         conn: ConnectionMatrix) -> NormalizedBasis:
    """Keep the holomorphic forms, change the rest so that ``M Lambda M^T = J``."""
    K = fam.field
    g = fam.genus
    L = pairing.rows()
    L12 = [row[g:] for row in L[:g]]
    L22 = [row[g:] for row in L[g:]]
    if not mat_det(L12, K):
        raise DegeneratePairing("holomorphic/second-kind block is singular")
    Q = transpose(mat_inverse(L12, K))
    S = mat_mul(mat_mul(Q, L22), transpose(Q))
    P = mat_scale(S, -K.one / 2)
    M = mat_zero(K, 2 * g)
    for i in range(g):
        M[i][i] = K.one
        for j in range(g):
            M[g + i][j] = P[i][j]
            M[g + i][g + j] = Q[i][j]
    if not is_zero_matrix(mat_sub(mat_mul(mat_mul(M, L), transpose(M)), standard_J(K, g))):
        raise DegeneratePairing("normalisation failed to reach the standard form")
    return NormalizedBasis(tuple(tuple(r) for r in M), conn.gauge(M))


# --------------------------------------------------------------- numeric side

# Sign relating numeric intersection pairings to residues:
#   Pi J Pi^T = KAPPA * 2 pi i * Lambda   for a symplectic cycle basis.
# Fixed once for the branch conventions used here; checked by Siegel positivity.
KAPPA = -1


def _mp_rational(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def _numeric_poly(coeffs, lam0) -> list:
    return [_mp_rational(eval_rf(c, lam0)) for c in coeffs]


def _horner(coeffs, z):
    acc = mpmath.mpc(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _segment_distance(p, a, b):
    ab = b - a
    t = mpmath.re((p - a) * mpmath.conj(ab)) / abs(ab) ** 2
    t = min(max(t, 0), 1)
    return abs(p - (a + t * ab))


@dataclass
class _Loop:
    vertices: list
    z0: object
    y0: object


def _stadium(e1, e2, delta, arc: int = 8):
    """Closed polygon around the segment ``[e1, e2]`` at distance ``delta``, counterclockwise."""
    u = (e2 - e1) / abs(e2 - e1)
    pts = []
    for k in range(arc + 1):
        th = -mpmath.pi / 2 + mpmath.pi * k / arc
        pts.append(e2 + delta * u * mpmath.expjpi(th / mpmath.pi))
    for k in range(arc + 1):
        th = mpmath.pi / 2 + mpmath.pi * k / arc
        pts.append(e1 + delta * u * mpmath.expjpi(th / mpmath.pi))
    # start at the tip beyond e2
    tip = e2 + delta * u
    i0 = arc // 2
    pts = pts[i0:] + pts[:i0]
    pts[0] = tip
    return pts + [tip]


class _Quadrature:
    def __init__(self, prec: int):
        self.prec = prec
        gl = mpmath.calculus.quadrature.GaussLegendre(mpmath.mp)
        self.nodes = gl.calc_nodes(4, mpmath.mp.prec)  # 24 nodes on [-1, 1]
        self.tol = mpmath.mpf(10) ** (-prec)
        self.error = mpmath.mpf(0)

    def rule(self, a, b, ya, fa, fpoly, forms):
        half = (b - a) / 2
        mid = (a + b) / 2
        acc = [mpmath.mpc(0)] * len(forms)
        for x, w in self.nodes:
            z = mid + half * x
            r = _horner(fpoly, z) / fa
            y = ya * mpmath.sqrt(r)
            for k, (h, m) in enumerate(forms):
                acc[k] += w * _horner(h, z) / y ** m
        return [half * v for v in acc]

    def edge(self, a, b, ya, fa, fpoly, forms, whole=None, depth=0):
        whole = whole if whole is not None else self.rule(a, b, ya, fa, fpoly, forms)
        m = (a + b) / 2
        left = self.rule(a, m, ya, fa, fpoly, forms)
        right = self.rule(m, b, ya, fa, fpoly, forms)
        split = [l + r for l, r in zip(left, right)]
        diff = max(abs(s - w) for s, w in zip(split, whole))
        if diff <= self.tol or depth >= 40:
            self.error += diff
            return split
        lo = self.edge(a, m, ya, fa, fpoly, forms, left, depth + 1)
        hi = self.edge(m, b, ya, fa, fpoly, forms, right, depth + 1)
        return [l + r for l, r in zip(lo, hi)]


def _refine(vertices, fpoly, samples: int = 24):
    """Split edges until ``f(z)/f(a)`` stays within 1/2 of 1 along each edge."""
    out = [vertices[0]]
    for b in vertices[1:]:
        stack = [(out[-1], b)]
        while stack:
            a, c = stack.pop()
            fa = _horner(fpoly, a)
            ok = all(abs(_horner(fpoly, a + (c - a) * mpmath.mpf(k) / samples) / fa - 1) < 0.5
                     for k in range(1, samples + 1))
            if ok:
                out.append(c)
            else:
                m = (a + c) / 2
                stack.append((m, c))
                stack.append((a, m))
    return out


def _integrate_loop(loop: _Loop, fpoly, forms, quad: _Quadrature):
    """Integrals of ``h dx / y^m`` around ``loop``; checks that ``y`` closes up."""
    verts = _refine(loop.vertices, fpoly)
    total = [mpmath.mpc(0)] * len(forms)
    y = loop.y0
    for a, b in zip(verts, verts[1:]):
        fa = _horner(fpoly, a)
        part = quad.edge(a, b, y, fa, fpoly, forms)
        total = [t + p for t, p in zip(total, part)]
        y = y * mpmath.sqrt(_horner(fpoly, b) / fa)
    if abs(y - loop.y0) > mpmath.mpf(10) ** (-quad.prec // 2) * abs(loop.y0):
        raise PeriodIntegrationError("branch of y did not close around the loop")
    return total


def _symplectic_reduce(X: list) -> list:
    """Integer unimodular ``W`` with ``W X W^T = J`` for antisymmetric unimodular ``X``."""
    n = len(X)
    B = [[int(i == j) for j in range(n)] for i in range(n)]

    def pair(u, v):
        return sum(u[i] * X[i][j] * v[j] for i in range(n) for j in range(n) if X[i][j])

    def comb(u, v, c):
        return [a + c * b for a, b in zip(u, v)]

    es, fs = [], []
    rest = B
    while rest:
        e = rest[0]
        others = rest[1:]
        # Euclid on pairings with e until a single +-1 survives
        while True:
            nz = [k for k, v in enumerate(others) if pair(e, v)]
            if not nz:
                raise PeriodIntegrationError("cycle intersection matrix is degenerate")
            k0 = min(nz, key=lambda k: abs(pair(e, others[k])))
            p0 = pair(e, others[k0])
            done = True
            for k in nz:
                if k != k0:
                    q = pair(e, others[k]) // p0
                    others[k] = comb(others[k], others[k0], -q)
                    if pair(e, others[k]):
                        done = False
            if done:
                break
        if abs(p0) != 1:
            raise PeriodIntegrationError("cycle intersection matrix is not unimodular")
        f = others.pop(k0)
        if p0 < 0:
            f = [-a for a in f]
        new_rest = []
        for v in others:
            a, b = pair(v, e), pair(v, f)
            # v - <v,f> e + <v,e> f is orthogonal to e and f when <e,f> = 1
            new_rest.append([vi - b * ei + a * fi for vi, ei, fi in zip(v, e, f)])
        es.append(e)
        fs.append(f)
        rest = new_rest
    return es + fs


@dataclass
class PeriodMatrixNumeric:
    """Periods of ``x^i dx/y`` (rows) over a symplectic cycle basis (columns)."""

    lambda0: tuple
    periods: object  # mpmath matrix
    error_estimate: float
    normalized: object = None
    integrality_defect: float = 0.0
    transform: list = field(default_factory=list)
    roots: list = field(default_factory=list)

    @property
    def genus(self) -> int:
        return self.periods.rows // 2

    def riemann_residual(self) -> float:
        """``|Pi' J Pi'^T - KAPPA 2 pi i J|`` for the normalised forms."""
        P = self.normalized
        g = self.genus
        J = mpmath.zeros(2 * g)
        for i in range(g):
            J[i, g + i] = 1
            J[g + i, i] = -1
        R = P * J * P.T - KAPPA * mpmath.mpc(0, 2) * mpmath.pi * J
        return float(mpmath.mnorm(R, 1))

    def to_json(self) -> dict:
        def arr(M):
            return [[[float(mpmath.re(M[i, j])), float(mpmath.im(M[i, j]))] for j in range(M.cols)] for i in range(M.rows)]

        return {
            "lambda": [str(q) for q in self.lambda0],
            "periods": arr(self.periods),
            "normalized": arr(self.normalized) if self.normalized is not None else None,
            "error_estimate": self.error_estimate,
            "integrality_defect": self.integrality_defect,
            "riemann_residual": self.riemann_residual() if self.normalized is not None else None,
            "cycle_transform": self.transform,
        }


@dataclass
class PeriodPlan:
    """Loops and branch choices at ``lambda0``; reusable at nearby base points."""

    fam: HyperellipticFamily
    lambda0: tuple
    prec: int
    loops: list
    transform: list | None = None

    def moved(self, lam) -> "PeriodPlan":
        f0 = _numeric_poly(self.fam.x_coeffs, self.lambda0)
        f1 = _numeric_poly(self.fam.x_coeffs, lam)
        loops = []
        for lp in self.loops:
            r = _horner(f1, lp.z0) / _horner(f0, lp.z0)
            loops.append(_Loop(lp.vertices, lp.z0, lp.y0 * mpmath.sqrt(r)))
        return PeriodPlan(self.fam, tuple(lam), self.prec, loops, self.transform)

    def integrate(self, forms) -> tuple[list, float]:
        """``out[k][c]``: integral of ``forms[k]`` (``DeRhamForm``) over loop ``c``."""
        fpoly = _numeric_poly(self.fam.x_coeffs, self.lambda0)
        num = [(_numeric_poly(list(fm.num), self.lambda0), fm.pole) for fm in forms]
        quad = _Quadrature(self.prec)
        cols = [_integrate_loop(lp, fpoly, num, quad) for lp in self.loops]
        return [[cols[c][k] for c in range(len(cols))] for k in range(len(forms))], float(quad.error)


def plan_periods(fam: HyperellipticFamily, lam0, prec: int = 30) -> PeriodPlan:
    lam0 = tuple(Fraction(q) for q in lam0)
    if len(fam.base) != len(lam0):
        raise FamilyError("base point dimension does not match the family")
    if eval_poly(fam.discriminant, lam0) == 0:
        raise BranchPointCollision(f"discriminant vanishes at {[str(q) for q in lam0]}")
    fpoly = _numeric_poly(fam.x_coeffs, lam0)
    roots = mpmath.polyroots(list(reversed(fpoly)), maxsteps=200, extraprec=4 * mpmath.mp.prec)
    roots = sorted((mpmath.mpc(r) for r in roots), key=lambda r: (float(mpmath.re(r)), float(mpmath.im(r))))
    loops = []
    for i in range(len(roots) - 1):
        e1, e2 = roots[i], roots[i + 1]
        L = abs(e2 - e1)
        others = [r for k, r in enumerate(roots) if k not in (i, i + 1)]
        dist = min([L] + [_segment_distance(r, e1, e2) for r in others])
        if dist < mpmath.mpf(10) ** (-prec // 3):
            raise BranchPointCollision("branch points too close for the loop construction")
        verts = _stadium(e1, e2, dist * mpmath.mpf("0.3"))
        z0 = verts[0]
        loops.append(_Loop(verts, z0, mpmath.sqrt(_horner(fpoly, z0))))
    return PeriodPlan(fam, lam0, prec, loops)


def _to_mp(rows):
    return mpmath.matrix([[mpmath.mpc(v) for v in r] for r in rows])


def numeric_period_oracle(fam: HyperellipticFamily, lam0, prec: int = 30,
                          plan: PeriodPlan | None = None) -> tuple[PeriodMatrixNumeric, PeriodPlan]:
    """Numeric periods over a symplectic basis built from loops around branch-point pairs."""
    with mpmath.workdps(prec + 10):
        plan = plan or plan_periods(fam, lam0, prec)
        basis = derham_basis(fam)
        raw, err = plan.integrate(basis)
        Pi = _to_mp(raw)
        g = fam.genus
        lam = plan.lambda0
        Lam = pairing_matrix(fam)
        L0 = mpmath.matrix([[_mp_rational(eval_rf(c, lam)) for c in row] for row in Lam.matrix])
        if plan.transform is None:
            Pinv = Pi ** -1
            X = Pinv * (KAPPA * mpmath.mpc(0, 2) * mpmath.pi * L0) * Pinv.T
            Xi = [[int(mpmath.nint(mpmath.re(X[i, j]))) for j in range(2 * g)] for i in range(2 * g)]
            defect = max(abs(X[i, j] - Xi[i][j]) for i in range(2 * g) for j in range(2 * g))
            if defect > 1e-3:
                raise PeriodIntegrationError(f"cycle pairing is not integral (defect {float(defect):.3g})")
            plan.transform = _symplectic_reduce(Xi)
        else:
            defect = mpmath.mpf(0)
        W = mpmath.matrix(plan.transform)
        P = Pi * W ** -1
        conn = gauss_manin_matrix(fam)
        M = symplectic_normalize(fam, Lam, conn).M
        M0 = mpmath.matrix([[_mp_rational(eval_rf(c, lam)) for c in row] for row in M])
        return PeriodMatrixNumeric(lam, P, err, M0 * P, float(defect), plan.transform), plan


def beta_blocks(pi) -> object:
    """``B^-1 A`` from the top blocks of a period matrix."""
    P = pi.periods if isinstance(pi, PeriodMatrixNumeric) else mpmath.matrix(pi)
    g = P.rows // 2
    A = P[0:g, 0:g]
    B = P[0:g, g:2 * g]
    scale = max((abs(B[i, j]) for i in range(g) for j in range(g)), default=0)
    if scale == 0 or abs(mpmath.det(B)) <= mpmath.mpf(10) ** (-mpmath.mp.dps // 2) * scale ** g:
        raise SingularBBlock("B block is numerically singular")
    return B ** -1 * A


def siegel_check(tau) -> tuple[float, float]:
    """``(symmetry residual, smallest eigenvalue of Im tau)``."""
    g = tau.rows
    sym = max((abs(tau[i, j] - tau[j, i]) for i in range(g) for j in range(g)), default=0)
    im = mpmath.matrix([[mpmath.im((tau[i, j] + tau[j, i]) / 2) for j in range(g)] for i in range(g)])
    ev = mpmath.eigsy(im)[0]
    return float(sym), float(min(ev[i] for i in range(g)))


def section_residual(fam: HyperellipticFamily, lam0, prec: int = 30, h: str = "1e-4") -> float:
    """Max entry of ``(Pi(l+h) - Pi(l-h))/2h - Omega Pi`` along the single base direction."""
    if len(fam.base) != 1:
        raise FamilyError("finite differences need a one-dimensional base")
    with mpmath.workdps(prec + 10):
        pm, plan = numeric_period_oracle(fam, lam0, prec)
        step = Fraction(h)
        lam = plan.lambda0[0]
        plus, _ = numeric_period_oracle(fam, (lam + step,), prec, plan.moved((lam + step,)))
        minus, _ = numeric_period_oracle(fam, (lam - step,), prec, plan.moved((lam - step,)))
        dP = (plus.periods - minus.periods) / (2 * _mp_rational(step))
        conn = gauss_manin_matrix(fam)
        O = mpmath.matrix([[_mp_rational(eval_rf(c, plan.lambda0)) for c in row] for row in conn.matrices[0]])
        R = dP - O * pm.periods
        return float(max(abs(R[i, j]) for i in range(R.rows) for j in range(R.cols)))


def period_derivatives(fam: HyperellipticFamily, form: DeRhamForm, lam0, order: int,
                       prec: int = 30) -> list:
    """``out[c][s]``: ``s``-th base derivative of the period of ``form`` over loop ``c``.

    Derivatives are taken under the integral sign on the forms themselves,
    independently of the connection matrix.
    """
    if len(fam.base) != 1:
        raise FamilyError("period derivatives need a one-dimensional base")
    with mpmath.workdps(prec + 10):
        plan = plan_periods(fam, lam0, prec)
        layers = [[form]]
        for _ in range(order):
            layers.append([g for fm in layers[-1] for g in derivative_forms(fm, fam, 0)])
        flat = [fm for layer in layers for fm in layer]
        vals, _ = plan.integrate(flat)
        out = []
        for c in range(len(plan.loops)):
            pos = 0
            row = []
            for layer in layers:
                row.append(sum((vals[pos + k][c] for k in range(len(layer))), mpmath.mpc(0)))
                pos += len(layer)
            out.append(row)
        return out
