"""Reproducible rate-one Poisson clouds on [0,n]^2 and their text format.

Random numbers come from SplitMix64 (Steele, Lea & Flood 2014), used as a
counter-based generator: output k of the stream with seed s is
``mix64(s + (k+1) * GAMMA mod 2**64)`` with

    GAMMA = 0x9E3779B97F4A7C15
    mix64(z): z = (z ^ z>>30) * 0xBF58476D1CE4E5B9
              z = (z ^ z>>27) * 0x94D049BB133111EB
              return z ^ z>>31

Uniform doubles are ``((u >> 11) + 0.5) * 2**-53``, strictly inside (0,1).
A per-trial seed is ``derive_seed(master, index)``, i.e. output ``index`` of
the stream seeded with ``master``.

The point count is drawn first: inversion when the mean is at most
``INVERSION_MAX_MEAN``, Hörmann's PTRS transformed rejection above it. Then
two uniforms per point, interleaved x, y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameter, ParseError, ValidationError
from .geometry import Point

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
INVERSION_MAX_MEAN = 1000.0

CLOUD_MAGIC = "# areatrap-cloud v1"


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def derive_seed(master: int, index: int) -> int:
    if not 0 <= master <= MASK64:
        raise InvalidParameter(f"seed must be a 64-bit unsigned integer, got {master!r}")
    if index < 0:
        raise InvalidParameter(f"index must be >= 0, got {index!r}")
    return mix64(master + (index + 1) * GAMMA)


class SeedSpec(NamedTuple):
    master_seed: int
    trial_index: int = 0

    @property
    def derived(self) -> int:
        return derive_seed(self.master_seed, self.trial_index)


class SplitMix64:
    """Counter-based SplitMix64 stream."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.counter = 0

    def next_u64(self, k: int) -> np.ndarray:
        ks = np.arange(self.counter + 1, self.counter + k + 1, dtype=np.uint64)
        self.counter += k
        with np.errstate(over="ignore"):
            states = ks * np.uint64(GAMMA) + np.uint64(self.seed)
            return _mix64_array(states)

    def next_doubles(self, k: int) -> np.ndarray:
        u = self.next_u64(k) >> np.uint64(11)
        return (u.astype(np.float64) + 0.5) * 2.0**-53

    def next_double(self) -> float:
        return float(self.next_doubles(1)[0])


def _poisson_inversion(mu: float, rng: SplitMix64) -> int:
    u = rng.next_double()
    k = 0
    logp = -mu
    log_mu = math.log(mu)
    cdf = math.exp(logp)
    kmax = int(mu + 60.0 * math.sqrt(mu) + 100)
    while cdf < u and k < kmax:
        k += 1
        logp += log_mu - math.log(k)
        cdf += math.exp(logp)
    return k


def _poisson_ptrs(mu: float, rng: SplitMix64) -> int:
    # Hörmann (1993), "The transformed rejection method for generating
    # Poisson random variables"; valid for mu >= 10.
    smu = math.sqrt(mu)
    b = 0.931 + 2.53 * smu
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2.0)
    log_mu = math.log(mu)
    while True:
        u, v = rng.next_doubles(2)
        u = float(u) - 0.5
        v = float(v)
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + mu + 0.43)
        if us >= 0.07 and v <= v_r:
            return k
        if k < 0 or (us < 0.013 and v > us):
            continue
        lhs = math.log(v) + math.log(inv_alpha) - math.log(a / (us * us) + b)
        rhs = -mu + k * log_mu - math.lgamma(k + 1)
        if lhs <= rhs:
            return k


def poisson_count(mu: float, rng: SplitMix64) -> int:
    if mu <= 0:
        return 0
    if mu <= INVERSION_MAX_MEAN:
        return _poisson_inversion(mu, rng)
    return _poisson_ptrs(mu, rng)


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Points of the environment, sorted by (x, then y)."""

    n: float
    xs: np.ndarray
    ys: np.ndarray
    seed: int = 0

    def __post_init__(self):
        xs = np.array(self.xs, dtype=np.float64).reshape(-1)
        ys = np.array(self.ys, dtype=np.float64).reshape(-1)
        if xs.shape != ys.shape:
            raise ValidationError("xs and ys must have equal length")
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "n", float(self.n))
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_points(cls, n, points, seed=0) -> "PointCloud":
        """Build a cloud from unordered points (sorted here, validated)."""
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        cloud = cls(n, pts[order, 0], pts[order, 1], seed)
        cloud.validate()
        return cloud

    @property
    def count(self) -> int:
        return self.xs.size

    def __len__(self):
        return self.count

    def points(self) -> list[Point]:
        return [Point(float(x), float(y)) for x, y in zip(self.xs, self.ys)]

    def validate(self) -> None:
        n = self.n
        if not (n >= 0 and math.isfinite(n)):
            raise ValidationError(f"box side must be finite and >= 0, got {n!r}")
        xs, ys = self.xs, self.ys
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValidationError("cloud coordinates must be finite")
        bad = np.flatnonzero((xs < 0) | (xs > n) | (ys < 0) | (ys > n))
        if bad.size:
            i = int(bad[0])
            raise ValidationError(f"point {i} ({xs[i]!r}, {ys[i]!r}) lies outside [0, {n!r}]^2")
        if xs.size > 1:
            unsorted = (xs[1:] < xs[:-1]) | ((xs[1:] == xs[:-1]) & (ys[1:] < ys[:-1]))
            bad = np.flatnonzero(unsorted)
            if bad.size:
                raise ValidationError(f"points not sorted by (x, y) at index {int(bad[0]) + 1}")

    def __eq__(self, other):
        if not isinstance(other, PointCloud):
            return NotImplemented
        return (
            self.n == other.n
            and self.seed == other.seed
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.ys, other.ys)
        )


def sample_poisson_square(n: float, seed: SeedSpec | int) -> PointCloud:
    """Rate-one Poisson process restricted to [0,n]^2."""
    if not (n >= 0 and math.isfinite(n)):
        raise InvalidParameter(f"box side must be finite and >= 0, got {n!r}")
    if isinstance(seed, int):
        seed = SeedSpec(seed, 0)
    s = seed.derived
    n = float(n)
    if n == 0.0:
        return PointCloud(0.0, [], [], s)
    rng = SplitMix64(s)
    count = poisson_count(n * n, rng)
    u = rng.next_doubles(2 * count)
    xs = n * u[0::2]
    ys = n * u[1::2]
    # n*u may round up to n; keep points strictly inside the box
    inside = np.nextafter(n, 0.0)
    np.minimum(xs, inside, out=xs)
    np.minimum(ys, inside, out=ys)
    order = np.lexsort((ys, xs))
    return PointCloud(n, xs[order], ys[order], s)


def save_cloud(cloud: PointCloud, path) -> None:
    lines = [
        CLOUD_MAGIC,
        f"# n={cloud.n!r} seed={cloud.seed} count={cloud.count}",
        "x,y",
    ]
    lines.extend(f"{x!r},{y!r}" for x, y in zip(cloud.xs.tolist(), cloud.ys.tolist()))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_header(line: str, lineno: int, keys: tuple[str, ...]) -> dict[str, str]:
    if not line.startswith("# "):
        raise ParseError("expected '# key=value ...' header", lineno)
    fields = {}
    for tok in line[2:].split():
        key, sep, val = tok.partition("=")
        if not sep:
            raise ParseError(f"malformed header field {tok!r}", lineno)
        fields[key] = val
    missing = [k for k in keys if k not in fields]
    if missing:
        raise ParseError(f"header missing {', '.join(missing)}", lineno)
    return fields


def _parse_float(text: str, lineno: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", lineno) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {text!r}", lineno)
    return v


def read_xy_rows(lines, first_lineno: int) -> tuple[list[float], list[float]]:
    xs: list[float] = []
    ys: list[float] = []
    for lineno, raw in enumerate(lines, start=first_lineno):
        row = raw.strip()
        if not row:
            continue
        parts = row.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'x,y', got {row!r}", lineno)
        xs.append(_parse_float(parts[0], lineno))
        ys.append(_parse_float(parts[1], lineno))
    return xs, ys


def load_cloud(path) -> PointCloud:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != CLOUD_MAGIC:
        raise ParseError(f"missing {CLOUD_MAGIC!r} magic line", 1)
    if len(lines) < 3:
        raise ParseError("truncated header", len(lines) + 1)
    hdr = _parse_header(lines[1], 2, ("n", "seed", "count"))
    n = _parse_float(hdr["n"], 2)
    try:
        seed = int(hdr["seed"])
        count = int(hdr["count"])
    except ValueError:
        raise ParseError("seed and count must be integers", 2) from None
    if not 0 <= seed <= MASK64:
        raise ParseError(f"seed out of u64 range: {seed}", 2)
    if lines[2].strip() != "x,y":
        raise ParseError("expected column header 'x,y'", 3)
    xs, ys = read_xy_rows(lines[3:], 4)
    if len(xs) != count:
        raise ParseError(f"header says count={count} but {len(xs)} rows follow", 2)
    cloud = PointCloud(n, xs, ys, seed)
    cloud.validate()
    return cloud

