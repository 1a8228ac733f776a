"""Feasible-set machinery: the set A(n, k) of all frequency distributions
placing n observations into k ordered bins.

Provides exact cardinality (stars and bars), streaming lexicographic
enumeration over cumulative forms, unbiased uniform sampling, and the
uniqueness audit that checks whether the exponentiated cumulative sums
sum((F_i/n)**z) separate every member of a feasible set.

Audits over integer exponents run in exact integer arithmetic, so ties
are detected with no tolerance ambiguity. Rational exponents p/q (the
default z = (k+1)/k is one) are also decided exactly: each term t**(p/q)
is u * v**(1/q) with v free of q-th powers, distinct such radicals are
linearly independent over the rationals, so two sums are equal exactly
when their integer coefficients agree radical by radical. That is tested
with deterministic random multipliers modulo 2**64, and any candidate
collision is confirmed against a second independent multiplier set
before it is reported. Exponents given as arbitrary floats fall back to
float64 sums; there, two values collide when they are bitwise equal or
within 1e-12 relative, and near-misses within (1e-12, 1e-9] relative are
reported separately as suspects for manual review.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .distributions import FrequencyDistribution, ValidationError

#: Default ceiling on feasible-set size for enumeration and audits.
DEFAULT_CAP = 20_000_000

COLLISION_RTOL = 1e-12
SUSPECT_RTOL = 1e-9

_HASH_MASK = (1 << 64) - 1
#: Fixed entropy so exact rational audits hash identically run to run.
_AUDIT_ENTROPY = 0x1BD49A56F0C3


class CapExceededError(ValidationError):
    """Feasible set too large to enumerate; carries the exact cardinality."""

    def __init__(self, n: int, k: int, cardinality: int, cap: int):
        super().__init__(
            f"feasible set A(n={n}, k={k}) has {cardinality} members, "
            f"exceeding the cap of {cap}"
        )
        self.cardinality = cardinality
        self.cap = cap


def _validate_nk(n: int, k: int) -> None:
    if n < 1:
        raise ValidationError(f"n must be at least 1, got {n}")
    if k < 2:
        raise ValidationError(f"k must be at least 2, got {k}")


def cardinality(n: int, k: int) -> int:
    """Exact number of members of A(n, k): C(n + k - 1, k - 1)."""
    _validate_nk(n, k)
    return math.comb(n + k - 1, k - 1)


@dataclass(frozen=True)
class FeasibleSetSpec:
    """The pair (n, k) identifying a feasible set, with its exact size."""

    n: int
    k: int
    cardinality: int

    @classmethod
    def of(cls, n: int, k: int) -> "FeasibleSetSpec":
        return cls(n=n, k=k, cardinality=cardinality(n, k))


def _cumulative_forms(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """Yield cumulative forms of A(n, k) in lexicographic order.

    A cumulative form is a nondecreasing k-tuple over 0..n whose last
    entry is n. The successor of a form increments the rightmost free
    position and levels everything after it.
    """
    head = [0] * (k - 1)
    while True:
        yield tuple(head) + (n,)
        i = k - 2
        while i >= 0 and head[i] == n:
            i -= 1
        if i < 0:
            return
        value = head[i] + 1
        for j in range(i, k - 1):
            head[j] = value


def _fd_from_cumulative(form: tuple[int, ...]) -> FrequencyDistribution:
    # internal fast path: forms are valid by construction, skip validation
    counts = (form[0],) + tuple(form[i] - form[i - 1] for i in range(1, len(form)))
    fd = FrequencyDistribution.__new__(FrequencyDistribution)
    object.__setattr__(fd, "counts", counts)
    return fd


def enumerate_members(n: int, k: int, cap: int = DEFAULT_CAP) -> Iterator[FrequencyDistribution]:
    """Stream every member of A(n, k), ordered lexicographically by
    cumulative form, refusing up front if the set exceeds ``cap``."""
    size = cardinality(n, k)
    if size > cap:
        raise CapExceededError(n, k, size, cap)
    return map(_fd_from_cumulative, _cumulative_forms(n, k))


def sample_uniform(n: int, k: int, seed) -> FrequencyDistribution:
    """Draw one member of A(n, k), each with probability 1/|A(n, k)|.

    Draws a uniform (k-1)-subset of {1, ..., n+k-1} by sparse partial
    Fisher-Yates and reads the gaps between the chosen separators as
    counts (stars and bars), so every composition is equally likely.
    ``seed`` may be an int or a numpy Generator; identical seeds produce
    identical draws.
    """
    _validate_nk(n, k)
    rng = np.random.default_rng(seed)
    separators = _random_subset(rng, n + k - 1, k - 1)
    counts = []
    prev = 0
    for s in separators:
        counts.append(s - prev - 1)
        prev = s
    counts.append(n + k - 1 - prev)
    return FrequencyDistribution(tuple(counts))


def _random_subset(rng: np.random.Generator, m: int, r: int) -> list[int]:
    """Sorted uniform r-subset of {1, ..., m} in O(r) time and space."""
    state: dict[int, int] = {}
    picked = []
    for i in range(r):
        j = int(rng.integers(i, m))
        picked.append(state.get(j, j))
        state[j] = state.get(i, i)
    return sorted(p + 1 for p in picked)


@dataclass(frozen=True)
class CollisionRecord:
    """One shared audit value with the members that produced it."""

    value: float
    count: int
    members: tuple[tuple[int, ...], ...]  # cumulative forms, possibly truncated


@dataclass(frozen=True)
class UniquenessReport:
    """Outcome of a uniqueness audit over one feasible set."""

    n: int
    k: int
    z: float
    total: int
    unique_values: int
    collision_count: int
    collisions: tuple[CollisionRecord, ...]
    suspect_count: int
    suspects: tuple[tuple[float, float], ...]
    exact: bool  # True when the audit ran in integer arithmetic

    @property
    def fully_unique(self) -> bool:
        return self.unique_values == self.total

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "z": self.z,
            "total": self.total,
            "unique_values": self.unique_values,
            "collision_count": self.collision_count,
            "collisions": [
                {"value": c.value, "count": c.count, "members": [list(m) for m in c.members]}
                for c in self.collisions
            ],
            "suspect_count": self.suspect_count,
            "suspects": [list(pair) for pair in self.suspects],
            "exact": self.exact,
        }

    def csv_summary(self) -> str:
        return f"{self.n},{self.k},{self.z!r},{self.total},{self.unique_values},{self.suspect_count}"


def audit_uniqueness(
    n: int,
    k: int,
    z,
    *,
    cap: int = DEFAULT_CAP,
    max_collisions: int = 20,
    witnesses_per_value: int = 4,
) -> UniquenessReport:
    """Compute sum((F_i/n)**z) for every member of A(n, k) and count the
    distinct values, reporting collisions with member witnesses.

    ``z`` may be a float or a ``fractions.Fraction``; Fractions (and
    small integers) are audited in exact arithmetic, other floats in
    float64 with the collision/suspect tolerance rule. The collision
    list is truncated to ``max_collisions`` records with at most
    ``witnesses_per_value`` cumulative forms each.
    """
    if isinstance(z, Fraction):
        if z <= 0:
            raise ValidationError(f"exponent must be positive, got {z}")
        z_frac = z
        z = float(z)
    else:
        z = float(z)
        if not z > 0:
            raise ValidationError(f"exponent must be positive, got {z}")
        z_frac = Fraction(int(z)) if z.is_integer() else None
    size = cardinality(n, k)
    if size > cap:
        raise CapExceededError(n, k, size, cap)

    use_int = (
        z_frac is not None
        and z_frac.denominator == 1
        and k * n ** int(z_frac) < 2**62
    )
    if z_frac is not None and z_frac.denominator > 1:
        return _audit_rational(n, k, z_frac, size, max_collisions, witnesses_per_value)
    if use_int:
        sums = _member_sums_int(n, k, int(z))
        values, counts = np.unique(sums, return_counts=True)
        colliding = values[counts >= 2]
        collision_sizes = counts[counts >= 2]
        unique_values = len(values)
        suspect_count = 0
        suspects: tuple[tuple[float, float], ...] = ()
        scale = float(n) ** z
        targets = {int(v): int(c) for v, c in zip(colliding[:max_collisions], collision_sizes)}
        witness_map = _collect_witnesses_int(n, k, int(z), set(targets), witnesses_per_value)
        records = tuple(
            CollisionRecord(value=v / scale, count=targets[v], members=tuple(witness_map[v]))
            for v in sorted(targets)
        )
        collision_count = len(colliding)
    else:
        sums = np.sort(_member_sums_float(n, k, z))
        gaps = np.diff(sums)
        limit_collide = COLLISION_RTOL * sums[1:]
        limit_suspect = SUSPECT_RTOL * sums[1:]
        new_cluster = gaps > limit_collide
        unique_values = int(new_cluster.sum()) + 1
        suspect_mask = new_cluster & (gaps <= limit_suspect)
        suspect_count = int(suspect_mask.sum())
        suspect_idx = np.flatnonzero(suspect_mask)[:max_collisions]
        suspects = tuple((float(sums[i]), float(sums[i + 1])) for i in suspect_idx)

        starts = np.concatenate(([0], np.flatnonzero(new_cluster) + 1, [size]))
        sizes = np.diff(starts)
        bad = np.flatnonzero(sizes >= 2)
        collision_count = len(bad)
        ranges = [
            (float(sums[starts[i]]), float(sums[starts[i] + sizes[i] - 1]), int(sizes[i]))
            for i in bad[:max_collisions]
        ]
        witness_map = _collect_witnesses_float(n, k, z, ranges, witnesses_per_value)
        records = tuple(
            CollisionRecord(value=lo, count=cnt, members=tuple(witness_map[idx]))
            for idx, (lo, _hi, cnt) in enumerate(ranges)
        )

    return UniquenessReport(
        n=n,
        k=k,
        z=z,
        total=size,
        unique_values=unique_values,
        collision_count=collision_count,
        collisions=records,
        suspect_count=suspect_count,
        suspects=suspects,
        exact=use_int,
    )


def audit_uniqueness_default(n: int, k: int, **kwargs) -> UniquenessReport:
    """Audit with the bin-dependent default exponent z = (k + 1) / k.

    The exponent is passed as an exact rational, so the audit decides
    ties in exact arithmetic rather than by float tolerance.
    """
    _validate_nk(n, k)
    return audit_uniqueness(n, k, Fraction(k + 1, k), **kwargs)


def _audit_rational(
    n: int, k: int, frac: Fraction, size: int, max_collisions: int, witnesses_per_value: int
) -> UniquenessReport:
    """Exact uniqueness audit for a non-integer rational exponent p/q.

    Each member's sum of t**(p/q) terms is an integer combination of the
    radicals v**(1/q) with v q-th-power-free, and such radicals are
    linearly independent over the rationals, so sums are equal exactly
    when those integer coefficient vectors are. The vectors are compared
    through random-multiplier hashes modulo 2**64; hashing can only
    merge, never split, so a fully unique result stands on its own,
    and candidate collisions are confirmed with a second independent
    multiplier set before being reported.
    """
    decomp = _root_decompositions(n, frac.numerator, frac.denominator)
    table_a = _hash_table(decomp, n, frac, lane=0)
    sums = _grow_sums(n, k, table_a) + table_a[n]
    values, counts = np.unique(sums, return_counts=True)
    colliding = values[counts >= 2]
    unique_values = len(values)
    records: tuple[CollisionRecord, ...] = ()
    collision_count = 0
    if len(colliding):
        table_b = _hash_table(decomp, n, frac, lane=1)
        clusters = _members_by_hash(n, k, table_a, {int(v) for v in colliding})
        confirmed, split_gain = _confirm_clusters(clusters, table_b)
        unique_values += split_gain
        collision_count = len(confirmed)
        z = float(frac)
        float_table = ((np.arange(n + 1, dtype=np.float64) / n) ** z).tolist()
        keyed = sorted(
            (math.fsum(float_table[v] for v in group[0]), group) for group in confirmed
        )
        records = tuple(
            CollisionRecord(value=value, count=len(group), members=tuple(group[:witnesses_per_value]))
            for value, group in keyed[:max_collisions]
        )
    return UniquenessReport(
        n=n,
        k=k,
        z=float(frac),
        total=size,
        unique_values=unique_values,
        collision_count=collision_count,
        collisions=records,
        suspect_count=0,
        suspects=(),
        exact=True,
    )


def _smallest_prime_factors(n: int) -> list[int]:
    """spf[m] = smallest prime factor of m, for m in 0..n (spf[0..1] unused)."""
    spf = list(range(n + 1))
    for i in range(2, int(n**0.5) + 1):
        if spf[i] == i:
            for j in range(i * i, n + 1, i):
                if spf[j] == j:
                    spf[j] = i
    return spf


def _root_decompositions(n: int, p: int, q: int) -> list[tuple[int, int]]:
    """For each t in 0..n, write t**(p/q) = u * v**(1/q) with v q-th-power-free.

    Returns (u mod 2**64, v) pairs; u is only ever used modulo 2**64.
    """
    spf = _smallest_prime_factors(n) if n >= 2 else []
    out = [(0, 1), (1, 1)] if n >= 1 else [(0, 1)]
    for t in range(2, n + 1):
        u = 1
        v = 1
        m = t
        while m > 1:
            prime = spf[m]
            e = 0
            while m % prime == 0:
                m //= prime
                e += 1
            whole, rem = divmod(e * p, q)
            u = (u * pow(prime, whole, 1 << 64)) & _HASH_MASK
            v *= prime**rem
        out.append((u, v))
    return out


def _hash_table(
    decomp: list[tuple[int, int]], n: int, frac: Fraction, lane: int
) -> np.ndarray:
    """uint64 hash of each term t**(p/q): its radical coefficient u times a
    random odd multiplier fixed per radical v. Deterministic per lane."""
    seed = np.random.SeedSequence(
        entropy=(_AUDIT_ENTROPY, n, frac.numerator, frac.denominator), spawn_key=(lane,)
    )
    rng = np.random.default_rng(seed)
    multipliers: dict[int, int] = {}
    table = np.zeros(n + 1, dtype=np.uint64)
    for t in range(1, n + 1):
        u, v = decomp[t]
        r = multipliers.get(v)
        if r is None:
            r = int(rng.integers(0, 1 << 64, dtype=np.uint64)) | 1
            multipliers[v] = r
        table[t] = (u * r) & _HASH_MASK
    return table


def _members_by_hash(
    n: int, k: int, table: np.ndarray, targets: set[int]
) -> dict[int, list[tuple[int, ...]]]:
    """All cumulative forms whose hash sum lands in ``targets``."""
    tbl = [int(h) for h in table]
    found: dict[int, list[tuple[int, ...]]] = {t: [] for t in targets}
    for form in _cumulative_forms(n, k):
        s = 0
        for v in form:
            s = (s + tbl[v]) & _HASH_MASK
        bucket = found.get(s)
        if bucket is not None:
            bucket.append(form)
    return found


def _confirm_clusters(
    clusters: dict[int, list[tuple[int, ...]]], table_b: np.ndarray
) -> tuple[list[list[tuple[int, ...]]], int]:
    """Split first-lane hash clusters by a second independent hash lane.

    Returns the confirmed collision groups (size >= 2 in both lanes) and
    the number of extra distinct values the second lane uncovered.
    """
    tbl = [int(h) for h in table_b]
    confirmed = []
    gain = 0
    for forms in clusters.values():
        sub: dict[int, list[tuple[int, ...]]] = {}
        for form in forms:
            s = 0
            for v in form:
                s = (s + tbl[v]) & _HASH_MASK
            sub.setdefault(s, []).append(form)
        gain += len(sub) - 1
        for group in sub.values():
            if len(group) >= 2:
                confirmed.append(group)
    return confirmed, gain


def _member_sums_float(n: int, k: int, z: float) -> np.ndarray:
    """sum((F_i/n)**z) for every member of A(n, k), one float64 per member.

    Sums are grown one component at a time over nondecreasing prefixes,
    grouped by last value, so each member costs one vectorized add. The
    final component is always n and contributes exactly 1.0.
    """
    table = (np.arange(n + 1, dtype=np.float64) / n) ** z
    return _grow_sums(n, k, table) + table[n]


def _member_sums_int(n: int, k: int, z: int) -> np.ndarray:
    """Exact integer sums sum(F_i**z) for every member of A(n, k)."""
    table = np.arange(n + 1, dtype=np.int64) ** z
    return _grow_sums(n, k, table) + table[n]


def _grow_sums(n: int, k: int, table: np.ndarray) -> np.ndarray:
    """Partial sums over all nondecreasing (k-1)-prefixes with values in 0..n."""
    cur = table.copy()
    counts = np.ones(n + 1, dtype=np.int64)  # prefixes ending at each value
    for _ in range(k - 2):
        offsets = np.cumsum(counts)  # prefixes with last value <= w
        grown = np.empty(int(offsets.sum()), dtype=table.dtype)
        pos = 0
        for w in range(n + 1):
            span = int(offsets[w])
            np.add(cur[:span], table[w], out=grown[pos : pos + span])
            pos += span
        cur = grown
        counts = offsets
    return cur


def _collect_witnesses_int(
    n: int, k: int, z: int, targets: set[int], per_value: int
) -> dict[int, list[tuple[int, ...]]]:
    if not targets:
        return {}
    table = [v**z for v in range(n + 1)]
    found: dict[int, list[tuple[int, ...]]] = {t: [] for t in targets}
    unfilled = len(targets)
    for form in _cumulative_forms(n, k):
        s = 0
        for v in form:
            s += table[v]
        bucket = found.get(s)
        if bucket is not None and len(bucket) < per_value:
            bucket.append(form)
            if len(bucket) == per_value:
                unfilled -= 1
                if unfilled == 0:
                    break
    return found


def _collect_witnesses_float(
    n: int, k: int, z: float, ranges: list[tuple[float, float, int]], per_value: int
) -> dict[int, list[tuple[int, ...]]]:
    if not ranges:
        return {}
    # replay the exact accumulation order used by _member_sums_float so
    # recomputed values land bitwise inside the recorded cluster ranges
    table = ((np.arange(n + 1, dtype=np.float64) / n) ** z).tolist()
    los = [r[0] for r in ranges]
    found: dict[int, list[tuple[int, ...]]] = {i: [] for i in range(len(ranges))}
    unfilled = len(ranges)
    for form in _cumulative_forms(n, k):
        s = 0.0
        for v in form:
            s += table[v]
        idx = bisect_right(los, s) - 1
        if idx < 0 or s > ranges[idx][1]:
            continue
        bucket = found[idx]
        if len(bucket) < per_value:
            bucket.append(form)
            if len(bucket) == per_value:
                unfilled -= 1
                if unfilled == 0:
                    break
    return found
