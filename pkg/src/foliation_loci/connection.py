"""Matrices of rational functions and flat connections ``dPi = Omega * Pi``."""
from __future__ import annotations

from dataclasses import dataclass

from sympy.polys.matrices import DomainMatrix

from .algebra import format_rational, fraction_field, poly_ring
from .errors import FlatnessFailure

Matrix = list  # list of rows of FracElement


def mat_zero(K, n, m=None):
    m = n if m is None else m
    return [[K.zero for _ in range(m)] for _ in range(n)]


def mat_identity(K, n):
    out = mat_zero(K, n)
    for i in range(n):
        out[i][i] = K.one
    return out


def mat_mul(A, B):
    K_zero = A[0][0] * 0
    return [
        [sum((A[i][k] * B[k][j] for k in range(len(B))), K_zero) for j in range(len(B[0]))]
        for i in range(len(A))
    ]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A, c):
    return [[c * a for a in row] for row in A]


def transpose(A):
    return [list(r) for r in zip(*A)]


def mat_diff(A, var):
    return [[a.diff(var) for a in row] for row in A]


def is_zero_matrix(A) -> bool:
    return all(not a for row in A for a in row)


def mat_inverse(A, K):
    dom = K.to_domain()
    M = DomainMatrix([[dom.convert(a) for a in row] for row in A], (len(A), len(A)), dom)
    return M.inv().to_list()


def mat_det(A, K):
    dom = K.to_domain()
    M = DomainMatrix([[dom.convert(a) for a in row] for row in A], (len(A), len(A)), dom)
    return M.det()


def format_matrix(A) -> list[list[str]]:
    return [[format_rational(a) for a in row] for row in A]


@dataclass(frozen=True)
class ConnectionMatrix:
    """Per-base-variable matrices ``Omega_i`` with ``d Pi / d x_i = Omega_i Pi``.

    ``inverted`` lists the polynomials that are units on the base chart.
    """

    base: tuple[str, ...]
    matrices: tuple
    inverted: tuple = ()

    @property
    def field(self):
        return fraction_field(self.base)

    @property
    def ring(self):
        return poly_ring(self.base)

    @property
    def size(self) -> int:
        return len(self.matrices[0])

    def curvature(self, i: int, j: int):
        """``d_i Omega_j - d_j Omega_i - [Omega_i, Omega_j]``."""
        K = self.field
        xi, xj = K.gens[i], K.gens[j]
        Oi, Oj = self.matrices[i], self.matrices[j]
        comm = mat_sub(mat_mul(Oi, Oj), mat_mul(Oj, Oi))
        return mat_sub(mat_sub(mat_diff(Oj, xi), mat_diff(Oi, xj)), comm)

    def check_flat(self) -> None:
        for i in range(len(self.base)):
            for j in range(i + 1, len(self.base)):
                curv = self.curvature(i, j)
                for a, row in enumerate(curv):
                    for b, v in enumerate(row):
                        if v:
                            raise FlatnessFailure((i, j), (a, b), format_rational(v))

    def gauge(self, M):
        """Connection for the new frame ``M * old``: ``dM M^-1 + M Omega M^-1``."""
        K = self.field
        Minv = mat_inverse(M, K)
        mats = []
        for i, O in enumerate(self.matrices):
            x = K.gens[i]
            new = mat_add(mat_mul(mat_diff(M, x), Minv), mat_mul(mat_mul(M, O), Minv))
            mats.append(new)
        return ConnectionMatrix(self.base, tuple(mats), self.inverted)

    def to_json(self) -> dict:
        return {
            "base": list(self.base),
            "omega": {name: format_matrix(O) for name, O in zip(self.base, self.matrices)},
        }
