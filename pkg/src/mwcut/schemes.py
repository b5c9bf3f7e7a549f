"""Side-parallel cuts (sparcs), the cutting schemes built from them, and rounding.

A sparc walks its terminals in a fixed order; terminal ``l`` claims every
still-unclaimed point with ``x_l >= thresholds[l]``.  Only the first
``slice_count`` terminals slice; whatever is left goes to the last terminal
in the order.  A terminal cuts a segment when it claims part, but not all,
of the segment's unclaimed portion.

Samplers return batches so Monte-Carlo work stays vectorized; a single cut
is just row ``t`` of a batch.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .discrete import DiscreteDistribution, load_distribution
from .errors import InvalidConfig, UnalignedSegment, ValidationError
from .geometry import Alignment, Segment, SimplexPoint, alignment_of
from .graphs import Labeling, check_labeling, cut_cost
from .relaxation import AlignedInstance

_MASK64 = (1 << 64) - 1


class RngState:
    """Counter-based generator (Philox) keyed by an explicit seed and stream id."""

    def __init__(self, seed: int = 0, stream: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream = int(stream) & _MASK64
        self._gen: Optional[np.random.Generator] = None

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            key = np.array([self.seed, self.stream], dtype=np.uint64)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def spawn(self, i: int) -> "RngState":
        """Independent child stream ``i``; does not advance this state."""
        child = np.random.SeedSequence([self.seed, self.stream, int(i)]).generate_state(1, np.uint64)[0]
        return RngState(self.seed, int(child))

    def __repr__(self):
        return f"RngState(seed={self.seed}, stream={self.stream})"


# --- single cuts --------------------------------------------------------------


@dataclass(frozen=True)
class Sparc:
    order: tuple
    thresholds: tuple  # indexed by terminal
    slice_count: int

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(x) for x in self.order))
        object.__setattr__(self, "thresholds", tuple(self.thresholds))
        k = len(self.order)
        if sorted(self.order) != list(range(k)):
            raise ValidationError(f"{self.order} is not a permutation")
        if len(self.thresholds) != k:
            raise ValidationError("need one threshold per terminal")
        if any(not 0 <= r <= 1 for r in self.thresholds):
            raise ValidationError("thresholds must lie in [0, 1]")
        if self.slice_count not in (k - 1, k):
            raise ValidationError("slice_count must be k or k-1")

    @property
    def k(self) -> int:
        return len(self.order)

    def classify(self, p) -> int:
        return classify_point(self, p)

    def crossings(self, e: Segment) -> int:
        return crossings_on_segment(self, e)


def _coords(p):
    return p.coords if isinstance(p, SimplexPoint) else tuple(p)


def classify_point(s: Sparc, p) -> int:
    """Terminal that claims ``p`` under sequential capture (closed corners)."""
    x = _coords(p)
    if len(x) != s.k:
        raise ValidationError("point and sparc have different k")
    for m, l in enumerate(s.order):
        if m < s.slice_count and x[l] >= s.thresholds[l]:
            return l
    return s.order[-1]


def _check_aligned(e: Segment) -> Alignment:
    al = alignment_of(e)
    if al is None:
        raise UnalignedSegment("crossing counts need an aligned segment")
    return al


def crossings_on_segment(s: Sparc, e: Segment) -> int:
    """Number of terminals that cut the aligned segment ``e``.

    The unclaimed part of ``e`` is always an interval of its parameter
    ``t``; a slice at ``t_c`` strictly inside that interval is a cut.
    Works exactly for rational segments.
    """
    al = _check_aligned(e)
    if e.k != s.k:
        raise ValidationError("segment and sparc have different k")
    a, b = e.a.coords, e.b.coords
    t0, t1 = 0, 1
    count = 0
    for m in range(s.slice_count):
        l = s.order[m]
        rho = s.thresholds[l]
        A = a[l]
        D = b[l] - a[l] if l in (al.i, al.j) else 0
        if D == 0:
            if A >= rho:
                break
            continue
        tc = (rho - A) / D
        if D > 0:
            if tc <= t0:
                break
            if tc < t1:
                count += 1
                t1 = tc
        else:
            if tc >= t1:
                break
            if tc > t0:
                count += 1
                t0 = tc
    return count


@dataclass(frozen=True)
class RayCut:
    """Three rays from ``r`` (k = 3), one per side of the triangle.

    ``winners[h]`` is the terminal whose line x_w = r_w carries the ray in
    the wedge next to side x_h = 0; that wedge belongs to ``winners[h]``.
    """

    r: tuple
    winners: tuple

    def classify(self, p) -> int:
        x = _coords(p)
        d = [x[l] - self.r[l] for l in range(3)]
        pos = [l for l in range(3) if d[l] > 0]
        if len(pos) == 1:
            return pos[0]
        if len(pos) == 2:
            h = 3 - pos[0] - pos[1]
            return self.winners[h]
        if len(pos) == 3:
            return int(np.argmax(d))
        return 0

    def crossings(self, e: Segment) -> int:
        al = _check_aligned(e)
        a = np.array([float(c) for c in e.a.coords])
        b = np.array([float(c) for c in e.b.coords])
        batch = RayBatch(np.array([self.r], dtype=float), np.array([self.winners]))
        return int(batch.crossings(a, b, al)[0])


# --- batches ------------------------------------------------------------------


class SparcBatch:
    """T sparcs stored as arrays: orders (T,k), thresholds (T,k), slice counts (T,)."""

    def __init__(self, orders, thresholds, slices):
        self.orders = np.asarray(orders, dtype=np.int64)
        self.thresholds = np.asarray(thresholds, dtype=float)
        self.slices = np.broadcast_to(np.asarray(slices, dtype=np.int64), (len(self.orders),)).copy()

    def __len__(self):
        return len(self.orders)

    @property
    def k(self) -> int:
        return self.orders.shape[1]

    def cut(self, t: int) -> Sparc:
        return Sparc(tuple(self.orders[t]), tuple(float(x) for x in self.thresholds[t]), int(self.slices[t]))

    def classify(self, P) -> np.ndarray:
        """Labels (T, n) of the points P (n, k)."""
        P = np.asarray(P, dtype=float)
        T, k = self.orders.shape
        rows = np.arange(T)
        lab = np.full((T, P.shape[0]), -1, dtype=np.int64)
        for m in range(k):
            l = self.orders[:, m]
            free = lab < 0
            if m == k - 1:
                cap = free
            else:
                thr = self.thresholds[rows, l]
                x = P[:, l].T
                cap = free & (x >= thr[:, None]) & (m < self.slices)[:, None]
            lab = np.where(cap, l[:, None], lab)
        return lab

    def crossings(self, a, b, al: Alignment) -> np.ndarray:
        """Crossing counts (T,) for the aligned segment a -> b (float arrays)."""
        a = np.asarray(a, dtype=float)
        D = np.zeros_like(a)
        D[al.i] = b[al.i] - a[al.i]
        D[al.j] = b[al.j] - a[al.j]
        T, k = self.orders.shape
        rows = np.arange(T)
        t0 = np.zeros(T)
        t1 = np.ones(T)
        alive = np.ones(T, dtype=bool)
        count = np.zeros(T, dtype=np.int64)
        for m in range(k):
            act = alive & (m < self.slices)
            if not act.any():
                break
            l = self.orders[:, m]
            rho = self.thresholds[rows, l]
            A, Dl = a[l], D[l]
            flat = act & (Dl == 0)
            alive &= ~(flat & (A >= rho))
            with np.errstate(divide="ignore", invalid="ignore"):
                tc = (rho - A) / Dl
            up = act & (Dl > 0)
            down = act & (Dl < 0)
            inside = (tc > t0) & (tc < t1)
            cut_up = up & inside
            cut_down = down & inside
            count += cut_up | cut_down
            t1 = np.where(cut_up, tc, t1)
            t0 = np.where(cut_down, tc, t0)
            alive &= ~((up & (tc <= t0)) | (down & (tc >= t1)))
        return count


def _side_pairs():
    return [tuple(l for l in range(3) if l != h) for h in range(3)]


class RayBatch:
    """T three-ray cuts: centers r (T,3) and per-side winners (T,3)."""

    def __init__(self, r, winners):
        self.r = np.asarray(r, dtype=float)
        self.winners = np.asarray(winners, dtype=np.int64)

    def __len__(self):
        return len(self.r)

    k = 3

    def cut(self, t: int) -> RayCut:
        return RayCut(tuple(float(x) for x in self.r[t]), tuple(int(x) for x in self.winners[t]))

    def classify(self, P) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        d = P[None, :, :] - self.r[:, None, :]
        pos = d > 0
        npos = pos.sum(axis=2)
        lab = np.zeros(npos.shape, dtype=np.int64)
        one = npos == 1
        lab[one] = np.argmax(pos, axis=2)[one]
        two = npos == 2
        h = np.argmin(pos, axis=2)
        w = np.take_along_axis(self.winners, h, axis=1)
        lab[two] = w[two]
        three = npos == 3
        lab[three] = np.argmax(d, axis=2)[three]
        return lab

    def crossings(self, a, b, al: Alignment) -> np.ndarray:
        """Number of label changes along a -> b, evaluated piecewise."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        T = len(self)
        ts = []
        for l in (al.i, al.j):
            with np.errstate(divide="ignore", invalid="ignore"):
                t = (self.r[:, l] - a[l]) / (b[l] - a[l])
            ts.append(np.clip(np.nan_to_num(t, nan=0.0, posinf=1.0, neginf=0.0), 0.0, 1.0))
        lo = np.minimum(ts[0], ts[1])
        hi = np.maximum(ts[0], ts[1])
        bounds = [np.zeros(T), lo, hi, np.ones(T)]
        labels, nonempty = [], []
        for s, e in zip(bounds, bounds[1:]):
            mid = (s + e) / 2
            pts = a[None, :] + mid[:, None] * (b - a)[None, :]
            labels.append(self._classify_rows(pts))
            nonempty.append(e > s)
        count = np.zeros(T, dtype=np.int64)
        prev = np.where(nonempty[0], labels[0], -1)
        for lab, ok in zip(labels[1:], nonempty[1:]):
            changed = ok & (prev >= 0) & (lab != prev)
            count += changed
            prev = np.where(ok, lab, prev)
        return count

    def _classify_rows(self, pts) -> np.ndarray:
        """Label of point ``pts[t]`` under cut ``t``."""
        d = pts - self.r
        pos = d > 0
        npos = pos.sum(axis=1)
        lab = np.zeros(len(pts), dtype=np.int64)
        rows = np.arange(len(pts))
        one = npos == 1
        lab[one] = np.argmax(pos, axis=1)[one]
        two = npos == 2
        h = np.argmin(pos, axis=1)
        lab[two] = self.winners[rows, h][two]
        three = npos == 3
        lab[three] = np.argmax(d, axis=1)[three]
        return lab


class CompositeBatch:
    """Rows of a batch drawn from several sub-batches (mixtures, ball/corner)."""

    def __init__(self, T: int, parts, info=None):
        self.T = T
        self.parts = [(np.asarray(idx, dtype=np.int64), b) for idx, b in parts if len(idx)]
        self.info = info or {}

    def __len__(self):
        return self.T

    @property
    def k(self) -> int:
        return self.parts[0][1].k

    def cut(self, t: int):
        for idx, b in self.parts:
            pos = np.searchsorted(idx, t)
            if pos < len(idx) and idx[pos] == t:
                return b.cut(int(pos))
        raise IndexError(t)

    def classify(self, P) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        out = np.zeros((self.T, P.shape[0]), dtype=np.int64)
        for idx, b in self.parts:
            out[idx] = b.classify(P)
        return out

    def crossings(self, a, b, al: Alignment) -> np.ndarray:
        out = np.zeros(self.T, dtype=np.int64)
        for idx, batch in self.parts:
            out[idx] = batch.crossings(a, b, al)
        return out


# --- scheme configurations ------------------------------------------------------


@dataclass(frozen=True)
class CKR:
    """Random order, one threshold shared by all terminals, k-1 slices."""

    k: int

    def __post_init__(self):
        if self.k < 2:
            raise InvalidConfig("CKR needs k >= 2")


@dataclass(frozen=True)
class IndependentUniform:
    """Random order, independent uniform thresholds, k-1 slices."""

    k: int

    def __post_init__(self):
        if self.k < 2:
            raise InvalidConfig("IndependentUniform needs k >= 2")


BALL_FORMS = ("sparc_equivalent", "independent_rays")


@dataclass(frozen=True)
class BallCorner:
    """The k = 3 ball/corner scheme.

    With probability ``ball_prob`` cut by rays through a random point r of
    the central hexagon, otherwise slice off the corners x_i, x_j >= rho of a
    random terminal pair, rho uniform on (2/3, 1].
    """

    ball_prob: float = 8 / 11
    form: str = "sparc_equivalent"

    def __post_init__(self):
        if not 0 <= self.ball_prob <= 1:
            raise InvalidConfig("ball_prob must lie in [0, 1]")
        if self.form not in BALL_FORMS:
            raise InvalidConfig(f"form must be one of {BALL_FORMS}")

    @property
    def k(self) -> int:
        return 3


@dataclass(frozen=True)
class IcutCorner:
    """Independent thresholds on [0, corner_at] mixed with a joint corner cut."""

    k: int
    corner_at: float = 6 / 11
    icut_prob: float = 0.667186
    use_last_slice: bool = True

    def __post_init__(self):
        if self.k < 2:
            raise InvalidConfig("IcutCorner needs k >= 2")
        if not 0.5 < self.corner_at < 1:
            raise InvalidConfig("corner_at must lie in (1/2, 1)")
        if not 0 <= self.icut_prob <= 1:
            raise InvalidConfig("icut_prob must lie in [0, 1]")

    @property
    def slice_count(self) -> int:
        return self.k if self.use_last_slice else self.k - 1


@dataclass(frozen=True)
class Discrete:
    """Draw a discrete sparc by probability, thresholds uniform in its boxes.

    ``order=None`` uses a uniformly random terminal order; a fixed order
    gives the unsymmetrized scheme.
    """

    distribution: DiscreteDistribution
    order: Optional[tuple] = None

    def __post_init__(self):
        if self.order is not None:
            order = tuple(int(x) for x in self.order)
            if sorted(order) != list(range(self.distribution.k)):
                raise InvalidConfig("order must be a permutation of the terminals")
            object.__setattr__(self, "order", order)

    @property
    def k(self) -> int:
        return self.distribution.k


@dataclass(frozen=True)
class Mixture:
    components: tuple  # of (weight, config)

    def __post_init__(self):
        comps = tuple((float(w), c) for w, c in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise InvalidConfig("empty mixture")
        if any(w < 0 for w, _ in comps):
            raise InvalidConfig("negative mixture weight")
        if abs(sum(w for w, _ in comps) - 1.0) > 1e-9:
            raise InvalidConfig("mixture weights must sum to 1")
        ks = {c.k for _, c in comps}
        if len(ks) != 1:
            raise InvalidConfig("mixture components must share k")

    @property
    def k(self) -> int:
        return self.components[0][1].k


SCHEME_TYPES = (CKR, IndependentUniform, BallCorner, IcutCorner, Discrete, Mixture)


def is_symmetric(cfg) -> bool:
    """True when the scheme's law is invariant under relabeling terminals."""
    if isinstance(cfg, Discrete):
        return cfg.order is None
    if isinstance(cfg, Mixture):
        return all(is_symmetric(c) for _, c in cfg.components)
    return isinstance(cfg, SCHEME_TYPES)


# --- samplers -------------------------------------------------------------------


def _random_orders(g: np.random.Generator, T: int, k: int) -> np.ndarray:
    return np.argsort(g.random((T, k)), axis=1, kind="stable")


def _open_unit(g, size):
    """Uniform on (0, 1]."""
    return 1.0 - g.random(size)


def _winners_from_bits(bits) -> np.ndarray:
    """Per-side winner: bit set means the lower-indexed terminal of the side wins."""
    out = np.empty(bits.shape, dtype=np.int64)
    for h, (i, j) in enumerate(_side_pairs()):
        out[:, h] = np.where(bits[:, h], i, j)
    return out


def winners_from_orders(orders) -> np.ndarray:
    """Per-side winner implied by a terminal order (earlier terminal wins)."""
    orders = np.asarray(orders)
    pos = np.argsort(orders, axis=1)
    out = np.empty((len(orders), 3), dtype=np.int64)
    for h, (i, j) in enumerate(_side_pairs()):
        out[:, h] = np.where(pos[:, i] < pos[:, j], i, j)
    return out


def _sample_ckr(cfg: CKR, g, T):
    orders = _random_orders(g, T, cfg.k)
    rho = _open_unit(g, T)
    return SparcBatch(orders, np.repeat(rho[:, None], cfg.k, axis=1), cfg.k - 1)


def _sample_uniform(cfg: IndependentUniform, g, T):
    orders = _random_orders(g, T, cfg.k)
    return SparcBatch(orders, _open_unit(g, (T, cfg.k)), cfg.k - 1)


def _sample_icut(cfg: IcutCorner, g, T):
    k, c = cfg.k, cfg.corner_at
    icut = g.random(T) < cfg.icut_prob
    orders = _random_orders(g, T, k)
    thr = c * _open_unit(g, (T, k))
    rho = c + (1 - c) * _open_unit(g, T)
    thr = np.where(icut[:, None], thr, rho[:, None])
    batch = SparcBatch(orders, thr, cfg.slice_count)
    batch.icut_mask = icut
    return batch


def _sample_ball_corner(cfg: BallCorner, g, T):
    # variant-specific draws come from their own stream so both forms share r, mode and corners
    vg = np.random.Generator(np.random.Philox(key=g.integers(0, 2**63, size=2, dtype=np.uint64)))
    ball = g.random(T) < cfg.ball_prob
    line_bd = g.random(T) < 0.5
    t = g.random(T)
    r = np.empty((T, 3))
    r[:, 0] = 2 / 3 * (1 - t)
    r[:, 1] = np.where(line_bd, t / 3, 1 / 3 + t / 3)
    r[:, 2] = np.where(line_bd, 1 / 3 + t / 3, t / 3)
    pair = g.integers(0, 3, size=T)
    rho = 2 / 3 + _open_unit(g, T) / 3
    bits = vg.random((T, 3)) < 0.5
    fallback = _random_orders(vg, T, 3)

    ball_idx = np.nonzero(ball)[0]
    corner_idx = np.nonzero(~ball)[0]
    # corner cut: slice the two terminals of the pair (excluded terminal = pair id) at rho
    h = pair[corner_idx]
    corner_orders = np.stack([(h + 1) % 3, (h + 2) % 3, h], axis=1)
    corner_thr = np.ones((len(corner_idx), 3))
    rows = np.arange(len(corner_idx))
    corner_thr[rows, corner_orders[:, 0]] = rho[corner_idx]
    corner_thr[rows, corner_orders[:, 1]] = rho[corner_idx]
    parts = [(corner_idx, SparcBatch(corner_orders, corner_thr, 2))]

    winners = _winners_from_bits(bits[ball_idx])
    if cfg.form == "independent_rays":
        parts.append((ball_idx, RayBatch(r[ball_idx], winners)))
    else:
        # transitive bit patterns are exactly the six orders; cyclic ones redraw
        wins = np.zeros((len(ball_idx), 3), dtype=np.int64)
        for h2 in range(3):
            wins[np.arange(len(ball_idx)), winners[:, h2]] += 1
        transitive = np.all(np.sort(wins, axis=1) == np.array([0, 1, 2]), axis=1)
        orders = np.where(transitive[:, None], np.argsort(-wins, axis=1, kind="stable"), fallback[ball_idx])
        parts.append((ball_idx, SparcBatch(orders, r[ball_idx], 2)))
    info = {"ball": ball, "r": r, "pair": pair, "rho": rho}
    return CompositeBatch(T, parts, info)


def _sample_discrete(cfg: Discrete, g, T):
    d = cfg.distribution
    k, N = d.k, d.N
    probs = np.array([p for _, p in d.entries])
    probs = probs / probs.sum()
    qs = np.array([s.q for s, _ in d.entries], dtype=np.int64).reshape(len(probs), k - 1)
    pick = g.choice(len(probs), size=T, p=probs)
    if cfg.order is None:
        orders = _random_orders(g, T, k)
    else:
        orders = np.tile(np.array(cfg.order, dtype=np.int64), (T, 1))
    vals = (qs[pick] + _open_unit(g, (T, k - 1))) / N
    thr = np.ones((T, k))
    rows = np.arange(T)
    for m in range(k - 1):
        thr[rows, orders[:, m]] = vals[:, m]
    batch = SparcBatch(orders, thr, k - 1)
    batch.entry = pick
    return batch


def _sample_mixture(cfg: Mixture, g, T):
    w = np.array([wt for wt, _ in cfg.components])
    comp = g.choice(len(w), size=T, p=w / w.sum())
    parts = []
    for c, (_, sub) in enumerate(cfg.components):
        idx = np.nonzero(comp == c)[0]
        if len(idx):
            parts.append((idx, _sample_with(sub, g, len(idx))))
    return CompositeBatch(T, parts, {"component": comp})


def _sample_with(cfg, g, T):
    if isinstance(cfg, CKR):
        return _sample_ckr(cfg, g, T)
    if isinstance(cfg, IndependentUniform):
        return _sample_uniform(cfg, g, T)
    if isinstance(cfg, IcutCorner):
        return _sample_icut(cfg, g, T)
    if isinstance(cfg, BallCorner):
        return _sample_ball_corner(cfg, g, T)
    if isinstance(cfg, Discrete):
        return _sample_discrete(cfg, g, T)
    if isinstance(cfg, Mixture):
        return _sample_mixture(cfg, g, T)
    raise InvalidConfig(f"unknown scheme {cfg!r}")


def sample_batch(cfg, rng: RngState, T: int):
    """Draw T independent cuts from the scheme."""
    if T < 1:
        raise ValidationError("need at least one sample")
    return _sample_with(cfg, rng.generator, T)


def sample_cut(cfg, rng: RngState):
    """One cut (a :class:`Sparc` or :class:`RayCut`) from the scheme."""
    return sample_batch(cfg, rng, 1).cut(0)


# --- rounding -------------------------------------------------------------------


def max_threads() -> int:
    env = os.environ.get("MWC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidConfig(f"MWC_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def round_embedding(cfg, inst: AlignedInstance, rng: RngState, repetitions: int, shard_size: int = 512):
    """Cheapest labeling over ``repetitions`` sampled cuts.

    Repetitions are split into fixed-size shards, shard ``s`` drawing from
    ``rng.spawn(s)``; the minimum is taken with ties going to the lowest
    shard and then the lowest row, so the result does not depend on the
    number of threads.
    """
    if repetitions < 1:
        raise ValidationError("repetitions must be >= 1")
    g = inst.graph
    if cfg.k != g.k:
        raise InvalidConfig(f"scheme has k={cfg.k} but the graph has k={g.k}")
    P = np.array([[float(c) for c in inst.points[v].coords] for v in range(g.node_count)])
    us, vs = g.endpoints()
    w = np.array([float(x) for _, _, x in g.edges])
    shards = [(s, min(shard_size, repetitions - s * shard_size)) for s in range((repetitions + shard_size - 1) // shard_size)]

    def run(shard):
        s, T = shard
        labs = sample_batch(cfg, rng.spawn(s), T).classify(P)
        costs = (labs[:, us] != labs[:, vs]).astype(float) @ w if len(w) else np.zeros(T)
        j = int(np.argmin(costs))
        return costs[j], s, labs[j]

    workers = min(max_threads(), len(shards))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run, shards))
    else:
        results = [run(sh) for sh in shards]
    best = min(results, key=lambda r: (r[0], r[1]))
    lab = Labeling(tuple(int(x) for x in best[2]))
    check_labeling(g, lab)
    return lab, cut_cost(g, lab)


# --- config files -----------------------------------------------------------------


def config_to_dict(cfg) -> dict:
    if isinstance(cfg, CKR):
        return {"variant": "ckr", "k": cfg.k}
    if isinstance(cfg, IndependentUniform):
        return {"variant": "independent_uniform", "k": cfg.k}
    if isinstance(cfg, BallCorner):
        return {"variant": "ball_corner", "ball_prob": cfg.ball_prob, "form": cfg.form}
    if isinstance(cfg, IcutCorner):
        return {"variant": "icut_corner", "k": cfg.k, "corner_at": cfg.corner_at,
                "icut_prob": cfg.icut_prob, "use_last_slice": cfg.use_last_slice}
    if isinstance(cfg, Discrete):
        d = {"variant": "discrete", "distribution": cfg.distribution.to_dict()}
        if cfg.order is not None:
            d["order"] = list(cfg.order)
        return d
    if isinstance(cfg, Mixture):
        return {"variant": "mixture",
                "components": [{"weight": w, "scheme": config_to_dict(c)} for w, c in cfg.components]}
    raise InvalidConfig(f"unknown scheme {cfg!r}")


def config_from_dict(d: dict, base_dir=None):
    if not isinstance(d, dict) or "variant" not in d:
        raise InvalidConfig("scheme config must be an object with a 'variant' key")
    v = d["variant"]
    try:
        if v == "ckr":
            return CKR(int(d["k"]))
        if v == "independent_uniform":
            return IndependentUniform(int(d["k"]))
        if v == "ball_corner":
            return BallCorner(float(d.get("ball_prob", 8 / 11)), d.get("form", "sparc_equivalent"))
        if v == "icut_corner":
            return IcutCorner(int(d["k"]), float(d.get("corner_at", 6 / 11)),
                              float(d.get("icut_prob", 0.667186)), bool(d.get("use_last_slice", True)))
        if v == "discrete":
            if "path" in d:
                path = Path(d["path"])
                if base_dir is not None and not path.is_absolute():
                    path = Path(base_dir) / path
                dist = load_distribution(path)
            else:
                dist = DiscreteDistribution.from_dict(d["distribution"])
            order = d.get("order")
            return Discrete(dist, None if order is None else tuple(order))
        if v == "mixture":
            return Mixture(tuple((float(c["weight"]), config_from_dict(c["scheme"], base_dir)) for c in d["components"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidConfig):
            raise
        raise InvalidConfig(f"malformed {v} config: {exc}") from exc
    raise InvalidConfig(f"unknown scheme variant {v!r}")


def save_config(cfg, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"scheme file is not valid JSON: {exc}") from exc
    return config_from_dict(d, base_dir=Path(path).parent)
