"""Finite-dimensional l_p spaces, their duals, and Rademacher type constants."""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import rng as _rng

INF = math.inf

EXHAUSTIVE_CAP = 24


def _parse_exponent(p):
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        try:
            p = Fraction(p)
        except ValueError:
            raise ValueError(f"cannot parse exponent {p!r}") from None
    if isinstance(p, Fraction):
        return int(p) if p.denominator == 1 else p
    if isinstance(p, (int, np.integer)):
        return int(p)
    p = float(p)
    if math.isnan(p):
        raise ValueError("exponent is NaN")
    return p


def dual_exponent(p):
    """Conjugate exponent ``q`` with ``1/p + 1/q = 1``.

    ``1`` and ``inf`` are swapped exactly.  Integer and ``Fraction`` inputs
    give exact ``Fraction`` (or ``int``) results, floats give floats.

    >>> dual_exponent(2)
    2
    >>> dual_exponent(Fraction(4, 3))
    4
    """
    p = _parse_exponent(p)
    if p < 1:
        raise ValueError(f"exponent must be >= 1, got {p}")
    if p == 1:
        return INF
    if p == INF:
        return 1
    if isinstance(p, (int, Fraction)):
        q = Fraction(p) / (Fraction(p) - 1)
        return int(q) if q.denominator == 1 else q
    return p / (p - 1.0)


@dataclass(frozen=True)
class NormSpec:
    """The space ``l_p^dim``.  ``p`` may be ``math.inf`` (or the string ``"inf"``)."""

    dim: int
    p: object = 2

    def __post_init__(self):
        p = _parse_exponent(self.p)
        if p < 1:
            raise ValueError(f"exponent must be >= 1, got {p}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def q(self):
        return dual_exponent(self.p)

    @property
    def is_polyhedral(self):
        return self.p == 1 or self.p == INF

    def dual(self):
        return NormSpec(self.dim, self.q)

    def norm(self, x):
        return norm(x, self)

    def to_json(self):
        p = self.p
        if p == INF:
            p = "inf"
        elif isinstance(p, Fraction):
            p = float(p)
        return {"p": p, "dim": self.dim}

    @classmethod
    def from_json(cls, obj):
        return cls(dim=obj["dim"], p=obj["p"])

    def __str__(self):
        p = "inf" if self.p == INF else str(self.p)
        return f"l_{p}^{self.dim}"


def as_vector(x, space=None, name="x"):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {x.shape}")
    if space is not None and x.shape[0] != space.dim:
        raise ValueError(f"{name} has length {x.shape[0]}, space {space} has dimension {space.dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} has non-finite coordinates")
    return x


def _pnorm_rows(X, p):
    """l_p norm along the last axis; scaled by the max entry so powers neither
    overflow nor underflow."""
    X = np.abs(X)
    if p == INF:
        return X.max(axis=-1)
    if p == 1:
        return X.sum(axis=-1)
    m = X.max(axis=-1)
    safe = np.where(m > 0, m, 1.0)
    Y = X / safe[..., None]
    if p == 2:
        return m * np.sqrt(np.einsum("...i,...i->...", Y, Y))
    p = float(p)
    return m * ((Y ** p).sum(axis=-1)) ** (1.0 / p)


def norm(x, space):
    """l_p norm of ``x`` in ``space``."""
    x = as_vector(x, space)
    return float(_pnorm_rows(x, space.p))


def norms(X, space):
    """Row-wise norms of a 2-d array."""
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != space.dim:
        raise ValueError(f"rows have length {X.shape[-1]}, space {space} has dimension {space.dim}")
    return _pnorm_rows(X, space.p)


def dual_norm(psi, space):
    """Norm of the functional ``psi`` on ``space`` (the l_q norm)."""
    return norm(psi, space.dual())


def norming_functional(x, space):
    """A functional ``phi`` with ``<phi, x> = ||x||`` and ``||phi||_* = 1``.

    Unique for ``1 < p < inf``.  For ``p = 1`` zero coordinates get 0; for
    ``p = inf`` the first maximizing coordinate is used.  Raises on ``x = 0``.
    """
    x = as_vector(x, space)
    p = space.p
    if not np.any(x):
        raise ValueError("the zero vector has no unique norming functional")
    if p == 1:
        return np.sign(x)
    if p == INF:
        phi = np.zeros_like(x)
        i = int(np.argmax(np.abs(x)))
        phi[i] = np.sign(x[i])
        return phi
    if p == 2:
        return x / np.linalg.norm(x)
    p = float(p)
    a = np.abs(x) / np.abs(x).max()
    g = np.sign(x) * a ** (p - 1.0)
    return g / float(_pnorm_rows(a, p)) ** (p - 1.0)


# ---------------------------------------------------------------------------
# Rademacher type


def _check_type_exponent(p):
    p = _parse_exponent(p)
    if not (1 < p <= 2):
        raise ValueError(f"type exponent must lie in (1, 2], got {p}")
    return p


@dataclass(frozen=True)
class TypeEstimate:
    p: object
    constant: float
    provenance: str
    # raw ratio for empirical estimates; ``constant`` is max(ratio, 1)
    sample_ratio: Optional[float] = None

    PROVENANCES = ("tabulated", "empirical-lower-bound", "user-supplied")

    def __post_init__(self):
        object.__setattr__(self, "p", _check_type_exponent(self.p))
        if self.provenance not in self.PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if not self.constant >= 1:
            raise ValueError(f"type constants are >= 1, got {self.constant}")


@dataclass(frozen=True)
class RademacherAverage:
    value: float
    stderr: float
    exact: bool
    samples: int


def _stack(vectors, space):
    if len(vectors) == 0:
        raise ValueError("empty vector list")
    S = np.asarray(vectors, dtype=float)
    if S.ndim != 2 or S.shape[1] != space.dim:
        raise ValueError(f"vectors must have shape (m, {space.dim}), got {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError("vectors have non-finite coordinates")
    return S


def _sign_block(start, stop, m):
    # rows are sign patterns with the first sign fixed to +1
    codes = np.arange(start, stop, dtype=np.int64)[:, None]
    bits = (codes >> np.arange(m - 1, dtype=np.int64)[None, :]) & 1
    return np.hstack([np.ones((stop - start, 1)), 1.0 - 2.0 * bits])


def rademacher_average(vectors, p, space, mode="exhaustive", trials=100_000, seed=0,
                       chunk=1 << 15):
    """``(E || sum eps_i s_i ||^p)^(1/p)`` over independent random signs.

    ``mode="exhaustive"`` enumerates all sign patterns (up to 24 vectors) and
    returns an exact value with ``stderr = 0``.  ``mode="monte_carlo"`` draws
    ``trials`` patterns from the counter-based stream of ``seed``; the
    standard error is propagated through the ``1/p`` power by the delta method.
    """
    S = _stack(vectors, space)
    p = float(_parse_exponent(p))
    if p < 1:
        raise ValueError(f"exponent must be >= 1, got {p}")
    m = S.shape[0]
    if mode == "exhaustive":
        if m > EXHAUSTIVE_CAP:
            raise ValueError(f"exhaustive mode is capped at {EXHAUSTIVE_CAP} vectors, got {m}")
        # eps and -eps give the same norm, so half the patterns suffice
        total, count = 0.0, 1 << (m - 1)
        for start in range(0, count, chunk):
            stop = min(count, start + chunk)
            sums = _sign_block(start, stop, m) @ S
            total += float((_pnorm_rows(sums, space.p) ** p).sum())
        return RademacherAverage((total / count) ** (1.0 / p), 0.0, True, count)
    if mode == "monte_carlo":
        trials = int(trials)
        if trials < 2:
            raise ValueError("monte_carlo mode needs at least 2 trials")
        values = np.empty(trials)
        for start in range(0, trials, chunk):
            stop = min(trials, start + chunk)
            g = _rng.stream(seed, _rng.RADEMACHER, start)
            eps = 2.0 * g.integers(0, 2, size=(stop - start, m)) - 1.0
            values[start:stop] = _pnorm_rows(eps @ S, space.p) ** p
        mean = float(values.mean())
        se_mean = float(values.std(ddof=1)) / math.sqrt(trials)
        value = mean ** (1.0 / p)
        stderr = (value / (p * mean)) * se_mean if mean > 0 else 0.0
        return RademacherAverage(value, stderr, False, trials)
    raise ValueError(f"unknown mode {mode!r}")


def type_lower_bound(vectors, p, space, **mode):
    """Empirical lower bound on ``T_p(space)`` from one vector set.

    The ratio ``rademacher_average / (sum ||s||^p)^(1/p)`` never exceeds the
    type constant.  Since a single vector already forces ``T_p >= 1`` the
    returned constant is ``max(ratio, 1)``; the raw ratio is kept as
    ``sample_ratio``.
    """
    p = _check_type_exponent(p)
    S = _stack(vectors, space)
    sizes = _pnorm_rows(S, space.p)
    if np.any(sizes == 0):
        raise ValueError("zero vectors are not allowed in a type estimate")
    avg = rademacher_average(S, p, space, **mode).value
    fp = float(p)
    ratio = avg / float((sizes ** fp).sum() ** (1.0 / fp))
    return TypeEstimate(p, max(ratio, 1.0), "empirical-lower-bound", sample_ratio=ratio)


DEFAULT_LINF_CONSTANT = 2.0


def type_constant_tabulated(space, p, linf_constant=DEFAULT_LINF_CONSTANT):
    """Upper bound on ``T_p(space)`` from a small built-in table.

    Entries (type measured with the L_p average of the signed sums):

    * ``l_2``: 1 for every ``p`` (parallelogram identity).
    * ``l_r``, ``2 < r < inf``: ``sqrt(r - 1)``, the sharp 2-uniform
      smoothness constant of L_r (a literature value, not derived here).
    * ``l_r``, ``1 < r < 2``: 1 when ``p <= r`` (Jensen plus subadditivity of
      ``t -> t^(r/2)`` coordinatewise); ``p > r`` is not tabulated.
    * ``l_inf^n``: ``max(1, C sqrt(ln n))`` with ``C = linf_constant``.
      ``C = 2`` is a valid bound for every ``n``: for ``n <= 8`` compare with
      l_2 (``T <= sqrt(n)``), beyond that use the sub-Gaussian moment bound
      ``E max_t Z_t^2 <= (2/u)(ln n - ln(1-u)/2) sum ||s||^2`` at ``u = 0.85``.
    * ``l_1``: trivial type, raises.

    Any entry for ``p`` also bounds every smaller type exponent, since the L_p
    average grows and ``(sum ||s||^p)^(1/p)`` shrinks as ``p`` increases.
    """
    p = _check_type_exponent(p)
    r = space.p
    if r == 1:
        raise ValueError(f"type constant of {space} for p={p} is unknown (l_1 has trivial type)")
    if r == 2:
        c = 1.0
    elif r == INF:
        c = max(1.0, float(linf_constant) * math.sqrt(math.log(space.dim)))
    elif r > 2:
        c = math.sqrt(float(r) - 1.0)
    elif p <= r:
        c = 1.0
    else:
        raise ValueError(f"type constant of {space} for p={p} is unknown (not tabulated for p > {r})")
    return TypeEstimate(p, c, "tabulated")


def default_type_exponent(space):
    """Largest type exponent of ``space`` that the table covers, or ``None``."""
    r = space.p
    if r == 1:
        return None
    if r == INF or r >= 2:
        return 2
    return r


def dual_type_estimate(space, linf_constant=DEFAULT_LINF_CONSTANT):
    """Tabulated type estimate of the dual of ``space`` at its best covered exponent."""
    dual = space.dual()
    p = default_type_exponent(dual)
    if p is None:
        raise ValueError(f"the dual of {space} has trivial type; no Helly bound applies")
    return type_constant_tabulated(dual, p, linf_constant=linf_constant)
