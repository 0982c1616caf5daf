"""Random instances and the JSON instance format.

Instance JSON::

    {"space": {"p": 2 | "inf", "dim": 3},
     "colors": [[{"vertices": [[...], ...]}, ...], ...],
     "witnesses": {"0,1": [...], ...}}          # optional

A plain family is a single color.  Witness keys are comma-joined index
tuples: set indices of a plain family, or one set index per color for a
colorful family.  Floats are written with ``repr`` (shortest round-trip
form), so reading back reproduces every vertex bit for bit.
"""

import itertools
import json
import math
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from . import rng
from .caratheodory import ColorGroup, PointCloud
from .helly import ColorfulFamily, Family, LowerCertificate
from .normed_space import INF, NormSpec, _pnorm_rows
from .polytope import VPolytope

TUPLE_BUDGET = 10**6


class SchemaError(ValueError):
    """Malformed instance data; the message starts with a JSON path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


# ---------------------------------------------------------------------------
# sampling


def uniform_ball(gen, space, size=None):
    """Uniform draws from the unit ball of ``space``.

    Uses generalized Gaussian coordinates: with ``|g_i| ~ Gamma(1/p)^(1/p)``
    and ``E ~ Exp(1)``, ``g / (||g||_p^p + E)^(1/p)`` is uniform in the
    l_p ball.  The cube (p = inf) is sampled directly.
    """
    shape = (space.dim,) if size is None else (size, space.dim)
    p = space.p
    if p == INF:
        return gen.uniform(-1.0, 1.0, shape)
    p = float(p)
    g = gen.gamma(1.0 / p, 1.0, shape) ** (1.0 / p) * gen.choice([-1.0, 1.0], shape)
    e = gen.exponential(1.0, shape[:-1])
    s = ((np.abs(g) ** p).sum(axis=-1) + e) ** (1.0 / p)
    return g / s[..., None]


def rainbow_sizes(k, set_size=2, max_tuples=256):
    """Per-color family sizes: ``set_size`` while the tuple count allows, then 1."""
    sizes, total = [], 1
    for _ in range(k):
        if total * set_size <= max_tuples:
            sizes.append(set_size)
            total *= set_size
        else:
            sizes.append(1)
    return sizes


@dataclass
class RainbowInstance:
    family: ColorfulFamily
    witnesses: Dict[tuple, np.ndarray]
    exhaustive: bool

    @property
    def covered(self):
        return list(self.witnesses)


def generate_rainbow_instance(space, k, sizes, seed, mode="exhaustive", samples=None,
                              budget=TUPLE_BUDGET, extra=0, spread=2.0, extra_radius=0.5):
    """Colorful family whose rainbow tuples all meet inside the unit ball.

    Every rainbow tuple (one set per color) gets a witness drawn uniformly
    from the unit ball, appended as a vertex to each set of the tuple.  In
    ``"sampled"`` mode only ``samples`` distinct random tuples are covered and
    the hypothesis holds for those tuples only (``exhaustive`` is False).

    ``extra`` adds that many further vertices to every set, drawn from a ball
    of radius ``extra_radius`` around a random point of ``spread`` times the
    unit ball; adding points never breaks the hypothesis.
    """
    sizes = [int(s) for s in sizes]
    if len(sizes) != k or k < 1:
        raise ValueError(f"need one size per color ({k} colors), got {sizes}")
    if any(s < 1 for s in sizes):
        raise ValueError("every color needs at least one set")
    total = math.prod(sizes)
    if mode == "exhaustive":
        if total > budget:
            raise ValueError(f"{total} rainbow tuples exceed the budget of {budget}; use sampled mode")
        tuples = list(itertools.product(*[range(s) for s in sizes]))
    elif mode == "sampled":
        if samples is None or samples < 1:
            raise ValueError("sampled mode needs a positive sample count")
        gen = rng.stream(seed, rng.INSTANCE, 0, 1)
        chosen = set()
        n_target = min(int(samples), total)
        while len(chosen) < n_target:
            chosen.add(tuple(int(gen.integers(s)) for s in sizes))
        tuples = sorted(chosen)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    verts = [[[] for _ in range(s)] for s in sizes]
    witnesses = {}
    for t, tup in enumerate(tuples):
        w = uniform_ball(rng.stream(seed, rng.WITNESS, t), space)
        witnesses[tup] = w
        for c, j in enumerate(tup):
            verts[c][j].append(w)
    for c, s in enumerate(sizes):
        for j in range(s):
            if extra:
                gen = rng.stream(seed, rng.INSTANCE, c + 1, j)
                center = spread * uniform_ball(gen, space)
                verts[c][j].extend(center + extra_radius * uniform_ball(gen, space, extra))
            if not verts[c][j]:
                # uncovered set in sampled mode: a lone far point keeps it nonempty
                verts[c][j].append(spread * uniform_ball(rng.stream(seed, rng.INSTANCE, c + 1, j), space))
    colors = [Family([VPolytope(np.array(v)) for v in vc], space) for vc in verts]
    return RainbowInstance(ColorfulFamily(colors), witnesses, mode == "exhaustive")


def check_rainbow_witnesses(instance, tol=1e-9):
    """Replay the recorded witnesses: each lies in the unit ball and in its sets."""
    from .polytope import distance

    fam = instance.family
    space = fam.space
    for tup, w in instance.witnesses.items():
        if float(_pnorm_rows(w, space.p)) > 1 + tol:
            return False
        for c, j in enumerate(tup):
            if distance(w, fam.colors[c].sets[j], space, tol=0.1 * tol).value > tol:
                return False
    return True


def random_cloud(space, m, seed, alpha=10.0, index=0):
    """Weighted cloud in the unit ball with barycenter exactly at zero (up to rounding).

    Points are centered at their ``Dirichlet(alpha)``-weighted mean and then
    scaled into the unit ball.
    """
    gen = rng.stream(seed, rng.INSTANCE, index, 2)
    P = uniform_ball(gen, space, m)
    lam = gen.dirichlet(np.full(m, alpha))
    P = P - lam @ P
    top = float(_pnorm_rows(P, space.p).max())
    if top > 0:
        P = P / top
    return PointCloud(P, lam)


def random_color_group(space, k, sizes, seed, alpha=10.0, index=0):
    """``k`` weighted clouds whose anchors sum to zero, all inside the unit ball."""
    gen = rng.stream(seed, rng.INSTANCE, index, 3)
    pts = [uniform_ball(gen, space, int(s)) for s in sizes]
    lams = [gen.dirichlet(np.full(int(s), alpha)) for s in sizes]
    shift = sum(l @ P for l, P in zip(lams, pts)) / k
    pts = [P - shift for P in pts]
    top = max(float(_pnorm_rows(P, space.p).max()) for P in pts)
    if top > 1:
        pts = [P / top for P in pts]
    return ColorGroup([PointCloud(P, l) for P, l in zip(pts, lams)])


# ---------------------------------------------------------------------------
# JSON


def _key(tup):
    return ",".join(str(int(i)) for i in tup)


def _parse_key(key, path):
    try:
        return tuple(int(s) for s in key.split(","))
    except (AttributeError, ValueError):
        raise SchemaError(path, f"witness key {key!r} is not a comma-separated index list") from None


def space_from_json(obj, path="$.space"):
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object with 'p' and 'dim'")
    for key in ("p", "dim"):
        if key not in obj:
            raise SchemaError(path, f"missing '{key}'")
    try:
        return NormSpec.from_json(obj)
    except (TypeError, ValueError) as exc:
        raise SchemaError(path, str(exc)) from None


def _matrix(obj, path, dim=None):
    if not isinstance(obj, list) or not obj:
        raise SchemaError(path, "expected a nonempty list of points")
    for i, row in enumerate(obj):
        if not isinstance(row, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                                for v in row):
            raise SchemaError(f"{path}[{i}]", "expected a list of numbers")
        if dim is not None and len(row) != dim:
            raise SchemaError(f"{path}[{i}]", f"has length {len(row)}, space dimension is {dim}")
    A = np.array(obj, dtype=float)
    if not np.all(np.isfinite(A)):
        raise SchemaError(path, "non-finite coordinate")
    return A


def _vector(obj, path, dim):
    return _matrix([obj], path, dim)[0] if isinstance(obj, list) else _fail(path, "expected a list")


def _fail(path, message):
    raise SchemaError(path, message)


def instance_to_json(family, witnesses=None):
    fam = family if isinstance(family, ColorfulFamily) else ColorfulFamily([family])
    out = {"space": fam.space.to_json(),
           "colors": [[K.to_json() for K in color.sets] for color in fam.colors]}
    if witnesses:
        out["witnesses"] = {_key(t): np.asarray(w, dtype=float).tolist() for t, w in witnesses.items()}
    return out


def instance_from_json(obj):
    """Parse an instance; returns ``(family, witnesses)``.

    A single color comes back as a plain :class:`Family`.
    """
    if not isinstance(obj, dict):
        raise SchemaError("$", "expected an object")
    if "space" not in obj:
        raise SchemaError("$", "missing 'space'")
    space = space_from_json(obj["space"])
    colors = obj.get("colors")
    if not isinstance(colors, list) or not colors:
        raise SchemaError("$.colors", "expected a nonempty list of colors")
    fams = []
    for c, color in enumerate(colors):
        if not isinstance(color, list) or not color:
            raise SchemaError(f"$.colors[{c}]", "expected a nonempty list of sets")
        sets = []
        for j, K in enumerate(color):
            path = f"$.colors[{c}][{j}]"
            if not isinstance(K, dict) or "vertices" not in K:
                raise SchemaError(path, "expected an object with 'vertices'")
            sets.append(VPolytope(_matrix(K["vertices"], path + ".vertices", space.dim)))
        fams.append(Family(sets, space))
    family = fams[0] if len(fams) == 1 else ColorfulFamily(fams)
    witnesses = None
    if "witnesses" in obj and obj["witnesses"] is not None:
        raw = obj["witnesses"]
        if not isinstance(raw, dict):
            raise SchemaError("$.witnesses", "expected an object")
        witnesses = {}
        for key, w in raw.items():
            path = f"$.witnesses[{key!r}]"
            witnesses[_parse_key(key, path)] = _vector(w, path, space.dim)
    return family, witnesses


def certificate_from_json(obj, n_sets=None, dim=None):
    if not isinstance(obj, dict):
        raise SchemaError("$", "expected an object")
    for key in ("functionals", "bound"):
        if key not in obj:
            raise SchemaError("$", f"missing '{key}'")
    psi = _matrix(obj["functionals"], "$.functionals", dim)
    if n_sets is not None and psi.shape[0] != n_sets:
        raise SchemaError("$.functionals", f"{psi.shape[0]} functionals for {n_sets} sets")
    if not isinstance(obj["bound"], (int, float)):
        raise SchemaError("$.bound", "expected a number")
    w = obj.get("weights")
    if w is not None:
        if not isinstance(w, list) or len(w) != psi.shape[0]:
            raise SchemaError("$.weights", "expected one weight per functional")
        w = np.array(w, dtype=float)
    return LowerCertificate(psi, float(obj["bound"]), w)


def cloud_from_json(obj):
    if not isinstance(obj, dict) or "points" not in obj:
        raise SchemaError("$", "expected an object with 'points'")
    P = _matrix(obj["points"], "$.points")
    w = obj.get("weights")
    if w is not None and (not isinstance(w, list) or len(w) != P.shape[0]):
        raise SchemaError("$.weights", "expected one weight per point")
    try:
        return PointCloud(P, w)
    except ValueError as exc:
        raise SchemaError("$", str(exc)) from None


def dumps(obj):
    """JSON text with shortest round-trip float formatting."""
    return json.dumps(obj, ensure_ascii=False)
