"""Closed convex cones: membership with margins, duals, Hilbert metric.

Four representations are supported, all pointed and solid:

* ``Orthant(n)``      -- the nonnegative orthant of R^n.
* ``Lorentz(n)``      -- vectors (t, x) in R x R^{n-1} with t >= |x|.
* ``PSDCone(n)``      -- positive semidefinite symmetric matrices, stored in
                         the packed chart coordinates of :mod:`.geometry`.
* ``Polyhedral``      -- finitely generated, given by BOTH generators and
                         inward facet normals (no facet enumeration here).

Membership is reported as a :class:`Containment` with a normalized margin:
the signed slack of the binding constraint divided by the vector norm, so
that margins are comparable across scales.  A zero vector sits on the
boundary of every closed cone and reports margin 0.

The Hilbert projective metric between interior rays u, v is

    d(u, v) = log(M / m),   M = inf{b : b v - u in C},
                            m = sup{a : u - a v in C}.

It has closed forms on the orthant and the PSD cone; on Lorentz and
polyhedral cones it is computed by bisection on a and b using the
membership test (bisection tolerance 1e-12).  Rays outside the interior
are at distance +inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConeConstructionError,
    DimensionMismatchError,
    UnsupportedInputError,
)
from .geometry import pack_sym, sym_dim, unpack_sym

DEFAULT_TOL = 1e-9  # membership tolerance on the normalized margin
_DUAL_TOL = 1e-12
_BISECT_TOL = 1e-12

OUTSIDE = "outside"
BOUNDARY = "boundary"
INTERIOR = "interior"


@dataclass(frozen=True)
class Containment:
    """Membership region plus the normalized signed margin."""

    region: str
    margin: float


def _classify(margin: float, tol: float) -> Containment:
    if margin > tol:
        return Containment(INTERIOR, margin)
    if margin < -tol:
        return Containment(OUTSIDE, margin)
    return Containment(BOUNDARY, margin)


class Cone:
    """Base class; concrete cones implement ``margin`` and samplers."""

    dim: int
    name: str = "cone"

    def _check_dim(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.dim:
            raise DimensionMismatchError(
                f"vector dim {v.shape[-1]} != cone dim {self.dim}"
            )
        return v

    def margin(self, v: np.ndarray) -> float:
        """Normalized signed slack of v; 0 for the zero vector."""
        raise NotImplementedError

    def contains(self, v: np.ndarray, tol: float = DEFAULT_TOL) -> Containment:
        if tol < 0:
            raise ValueError("tol must be >= 0")
        v = self._check_dim(v)
        return _classify(self.margin(v), tol)

    def dual_contains(self, lam: np.ndarray) -> bool:
        """True iff lam lies in the dual cone (within 1e-12 slack)."""
        raise NotImplementedError

    def generators(self):
        """Finite generating set as rows, or None when there is none."""
        return None

    def facet_normals(self):
        """Inward facet normals as rows, or None when not polyhedral."""
        return None

    def interior_witness(self) -> np.ndarray:
        """A unit vector strictly inside the cone."""
        raise NotImplementedError

    def boundary_rays(self, rng: np.random.Generator, k: int) -> np.ndarray:
        """k extreme/boundary unit rays, randomised where the set is infinite."""
        raise NotImplementedError

    def hilbert_distance(self, u: np.ndarray, v: np.ndarray) -> float:
        u = self._check_dim(u)
        v = self._check_dim(v)
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if nu == 0.0 or nv == 0.0:
            raise ValueError("hilbert_distance is undefined for the zero vector")
        if self.contains(u).region != INTERIOR or self.contains(v).region != INTERIOR:
            return math.inf
        return self._hilbert_interior(u / nu, v / nv)

    def _hilbert_interior(self, u: np.ndarray, v: np.ndarray) -> float:
        # generic route: bisection on the two support ratios
        member = lambda w: self.margin(w) >= 0.0

        hi = 1.0
        for _ in range(200):
            if not member(u - hi * v):
                break
            hi *= 2.0
        else:  # pragma: no cover - impossible for pointed solid cones
            raise ConeConstructionError("bisection bracket failure (sup side)")
        lo = 0.0
        while hi - lo > _BISECT_TOL:
            mid = 0.5 * (lo + hi)
            if member(u - mid * v):
                lo = mid
            else:
                hi = mid
        m = lo

        hi = 1.0
        for _ in range(200):
            if member(hi * v - u):
                break
            hi *= 2.0
        else:  # pragma: no cover
            raise ConeConstructionError("bisection bracket failure (inf side)")
        lo = 0.0
        while hi - lo > _BISECT_TOL:
            mid = 0.5 * (lo + hi)
            if member(mid * v - u):
                hi = mid
            else:
                lo = mid
        M = hi

        if m <= 0.0:
            return math.inf
        return math.log(M / m)


class Orthant(Cone):
    """The nonnegative orthant in R^n."""

    name = "orthant"

    def __init__(self, n: int):
        if n < 1:
            raise ConeConstructionError("orthant needs n >= 1")
        self.n = n
        self.dim = n

    def margin(self, v: np.ndarray) -> float:
        v = self._check_dim(v)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return 0.0
        return float(np.min(v) / nv)

    def dual_contains(self, lam: np.ndarray) -> bool:
        lam = self._check_dim(lam)
        return bool(np.min(lam) >= -_DUAL_TOL * max(1.0, np.linalg.norm(lam)))

    def generators(self) -> np.ndarray:
        return np.eye(self.n)

    def facet_normals(self) -> np.ndarray:
        return np.eye(self.n)

    def interior_witness(self) -> np.ndarray:
        return np.ones(self.n) / np.sqrt(self.n)

    def boundary_rays(self, rng: np.random.Generator, k: int) -> np.ndarray:
        # extreme rays of the orthant are the coordinate axes
        idx = np.arange(k) % self.n
        return np.eye(self.n)[idx]

    def _hilbert_interior(self, u: np.ndarray, v: np.ndarray) -> float:
        r = u / v
        return float(np.log(np.max(r) / np.min(r)))


class Lorentz(Cone):
    """Second-order cone {(t, x) : t >= |x|} in R^n (self-dual)."""

    name = "lorentz"

    def __init__(self, n: int):
        if n < 2:
            raise ConeConstructionError("lorentz cone needs n >= 2")
        self.n = n
        self.dim = n

    def margin(self, v: np.ndarray) -> float:
        v = self._check_dim(v)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return 0.0
        return float((v[..., 0] - np.linalg.norm(v[..., 1:], axis=-1)) / nv)

    def dual_contains(self, lam: np.ndarray) -> bool:
        lam = self._check_dim(lam)
        if np.linalg.norm(lam) == 0.0:
            return True
        return bool(self.margin(lam) >= -_DUAL_TOL)

    def interior_witness(self) -> np.ndarray:
        w = np.zeros(self.n)
        w[0] = 1.0
        return w

    def boundary_rays(self, rng: np.random.Generator, k: int) -> np.ndarray:
        rays = np.zeros((k, self.n))
        rays[:, 0] = 1.0
        if self.n == 2:
            rays[:, 1] = np.where(np.arange(k) % 2 == 0, 1.0, -1.0)
        else:
            x = rng.normal(size=(k, self.n - 1))
            rays[:, 1:] = x / np.linalg.norm(x, axis=1, keepdims=True)
        return rays / np.linalg.norm(rays, axis=1, keepdims=True)


class PSDCone(Cone):
    """Positive semidefinite cone in packed symmetric coordinates."""

    name = "psd"

    def __init__(self, n: int):
        if n < 1:
            raise ConeConstructionError("psd cone needs n >= 1")
        self.n = n
        self.dim = sym_dim(n)

    def margin(self, v: np.ndarray) -> float:
        v = self._check_dim(v)
        nv = np.linalg.norm(v)  # equals the Frobenius norm of the matrix
        if nv == 0.0:
            return 0.0
        w = np.linalg.eigvalsh(unpack_sym(v, self.n))
        return float(np.min(w) / nv)

    def dual_contains(self, lam: np.ndarray) -> bool:
        lam = self._check_dim(lam)
        if np.linalg.norm(lam) == 0.0:
            return True
        return bool(self.margin(lam) >= -_DUAL_TOL)

    def interior_witness(self) -> np.ndarray:
        return pack_sym(np.eye(self.n)) / np.sqrt(self.n)

    def boundary_rays(self, rng: np.random.Generator, k: int) -> np.ndarray:
        # rank-one projectors q q^T are the extreme rays
        q = rng.normal(size=(k, self.n))
        q /= np.linalg.norm(q, axis=1, keepdims=True)
        return pack_sym(q[:, :, None] * q[:, None, :])

    def _hilbert_interior(self, u: np.ndarray, v: np.ndarray) -> float:
        U = unpack_sym(u, self.n)
        V = unpack_sym(v, self.n)
        w, Q = np.linalg.eigh(V)
        R = (Q / np.sqrt(w)) @ Q.T
        lam = np.linalg.eigvalsh(R @ U @ R)
        return float(np.log(np.max(lam) / np.min(lam)))


class Polyhedral(Cone):
    """Finitely generated cone given by generators AND inward facet normals.

    Both representations must be supplied; construction verifies that every
    generator satisfies every facet inequality, that the cone is pointed
    (no generator's negation is inside), and that it is solid (an interior
    witness exists).
    """

    name = "polyhedral"

    def __init__(self, generators, facet_normals, witness=None):
        G = np.atleast_2d(np.asarray(generators, dtype=float))
        L = np.atleast_2d(np.asarray(facet_normals, dtype=float))
        if G.shape[1] != L.shape[1]:
            raise DimensionMismatchError("generator / normal dimension mismatch")
        if np.any(np.linalg.norm(G, axis=1) == 0.0):
            raise ConeConstructionError("zero generator")
        if np.any(np.linalg.norm(L, axis=1) == 0.0):
            raise ConeConstructionError("zero facet normal")
        self.dim = G.shape[1]
        self._gens = G
        self._normals_unit = L / np.linalg.norm(L, axis=1, keepdims=True)

        prods = self._gens @ self._normals_unit.T
        scale = np.linalg.norm(G, axis=1)[:, None]
        if np.min(prods / scale) < -1e-12:
            raise ConeConstructionError(
                "a generator violates a facet inequality (rep inconsistency)"
            )
        for g in self._gens:
            if self.margin(-g) >= -1e-12:
                raise ConeConstructionError("cone is not pointed: -g inside")

        if witness is None:
            unit = G / np.linalg.norm(G, axis=1, keepdims=True)
            witness = unit.mean(axis=0)
        witness = np.asarray(witness, dtype=float)
        nw = np.linalg.norm(witness)
        if nw == 0.0 or self.margin(witness) <= DEFAULT_TOL:
            raise ConeConstructionError("cone is not solid: no interior witness")
        self._witness = witness / nw

    def margin(self, v: np.ndarray) -> float:
        v = self._check_dim(v)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return 0.0
        return float(np.min(self._normals_unit @ v) / nv)

    def dual_contains(self, lam: np.ndarray) -> bool:
        lam = self._check_dim(lam)
        return bool(np.min(self._gens @ lam) >= -_DUAL_TOL)

    def generators(self) -> np.ndarray:
        return self._gens.copy()

    def facet_normals(self) -> np.ndarray:
        return self._normals_unit.copy()

    def interior_witness(self) -> np.ndarray:
        return self._witness.copy()

    def boundary_rays(self, rng: np.random.Generator, k: int) -> np.ndarray:
        idx = np.arange(k) % len(self._gens)
        G = self._gens[idx]
        return G / np.linalg.norm(G, axis=1, keepdims=True)


def contains(c: Cone, v: np.ndarray, tol: float = DEFAULT_TOL) -> Containment:
    """Module-level alias for :meth:`Cone.contains`."""
    return c.contains(v, tol)


def hilbert_distance(c: Cone, u: np.ndarray, v: np.ndarray) -> float:
    """Module-level alias for :meth:`Cone.hilbert_distance`."""
    return c.hilbert_distance(u, v)


def dual_contains(c: Cone, lam: np.ndarray) -> bool:
    """Module-level alias for :meth:`Cone.dual_contains`."""
    return c.dual_contains(lam)


def cone_from_spec(spec: dict) -> Cone:
    """Build a cone from its JSON scenario form, e.g. {"type":"orthant","n":2}."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise UnsupportedInputError("cone spec must be an object with a 'type'")
    kind = spec["type"]
    if kind == "orthant":
        return Orthant(int(spec["n"]))
    if kind == "lorentz":
        return Lorentz(int(spec["n"]))
    if kind == "psd":
        return PSDCone(int(spec["n"]))
    if kind == "polyhedral":
        return Polyhedral(spec["generators"], spec["facet_normals"])
    raise UnsupportedInputError(f"unknown cone type {kind!r}")


def cone_to_spec(c: Cone) -> dict:
    if isinstance(c, Orthant):
        return {"type": "orthant", "n": c.n}
    if isinstance(c, Lorentz):
        return {"type": "lorentz", "n": c.n}
    if isinstance(c, PSDCone):
        return {"type": "psd", "n": c.n}
    if isinstance(c, Polyhedral):
        return {
            "type": "polyhedral",
            "generators": c.generators().tolist(),
            "facet_normals": c.facet_normals().tolist(),
        }
    raise UnsupportedInputError(f"cannot serialize cone {type(c).__name__}")
