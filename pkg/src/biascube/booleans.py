"""Boolean functions on {0,1}^n as dense truth tables.

Point encoding, fixed everywhere in this package including serialization: a
point is an integer x in [0, 2**n), and coordinate i (1-based) is bit (i-1)
of x. Coordinate 1 is the least significant bit. A truth table is indexed by
the point integer, so ``table[x]`` is f(x).

Dense tables are capped at ``arity_cap()`` coordinates (default 24, i.e.
16 Mi entries); larger instances go through the closed-form or Monte Carlo
paths instead.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_ARITY_CAP = 24
ARITY_CAP_ENV = "BIASCUBE_MAX_ARITY"

FAMILY_NAMES = (
    "dictator",
    "and_all",
    "or_all",
    "majority",
    "parity",
    "tribes",
    "cyclic_run",
)

_FAMILY_ALIASES = {"or": "or_all", "and": "and_all"}


def arity_cap() -> int:
    """Largest arity admitted for dense truth tables."""
    raw = os.environ.get(ARITY_CAP_ENV)
    if raw is None:
        return DEFAULT_ARITY_CAP
    cap = int(raw)
    if cap < 1:
        raise ValueError(f"{ARITY_CAP_ENV} must be a positive integer, got {raw!r}")
    return cap


@lru_cache(maxsize=32)
def popcounts(n: int) -> np.ndarray:
    """Hamming weight of every point of {0,1}^n, indexed by point integer."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    counts = np.zeros(1, dtype=np.uint8)
    for _ in range(n):
        counts = np.concatenate([counts, counts + 1])
    counts.flags.writeable = False
    return counts


def coordinate(x: int, i: int) -> int:
    """Value of coordinate i (1-based) at point x."""
    return (x >> (i - 1)) & 1


def with_coordinate(x: int, i: int, value: int) -> int:
    """Point x with coordinate i forced to value."""
    bit = 1 << (i - 1)
    return (x | bit) if value else (x & ~bit)


@dataclass(eq=False)
class BooleanFunction:
    """A Boolean function given by its dense truth table."""

    n: int
    table: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("arity must be at least 1")
        table = np.asarray(self.table, dtype=np.uint8)
        if table.shape != (1 << self.n,):
            raise ValueError(
                f"table length {table.shape} does not match 2**{self.n}"
            )
        if not np.isin(table, (0, 1)).all():
            raise ValueError("table entries must be 0 or 1")
        table = np.ascontiguousarray(table)
        table.flags.writeable = False
        object.__setattr__(self, "table", table)

    def evaluate(self, x: int) -> int:
        if not 0 <= x < (1 << self.n):
            raise ValueError(f"point {x} out of range for arity {self.n}")
        return int(self.table[x])

    __call__ = evaluate

    def values(self) -> np.ndarray:
        """Truth table as float64, for use with the measure calculus."""
        return self.table.astype(np.float64)

    def is_constant(self) -> bool:
        return bool((self.table == self.table[0]).all())

    def to_table_string(self) -> str:
        packed = np.packbits(self.table, bitorder="little").tobytes()
        value = int.from_bytes(packed, "little")
        return f"n={self.n}:hex={value:X}"


def make_from_table(n: int, bits, cap: int | None = None) -> BooleanFunction:
    """Build a BooleanFunction from an explicit table, enforcing the arity cap."""
    cap = arity_cap() if cap is None else cap
    if n > cap:
        raise ValueError(
            f"arity {n} exceeds the dense-table cap {cap}; use a closed-form "
            "family or the Monte Carlo estimators"
        )
    return BooleanFunction(n, np.asarray(bits))


def parse_table_string(text: str, cap: int | None = None) -> BooleanFunction:
    """Parse the ``n=<arity>:hex=<table>`` serialization."""
    try:
        n_part, hex_part = text.split(":", 1)
        if not n_part.startswith("n=") or not hex_part.startswith("hex="):
            raise ValueError
        n = int(n_part[2:])
        value = int(hex_part[4:], 16)
    except ValueError:
        raise ValueError(f"malformed table string {text!r}, expected n=<arity>:hex=<hex>")
    if n < 1:
        raise ValueError("arity must be at least 1")
    if value < 0 or value.bit_length() > (1 << n):
        raise ValueError(f"hex table does not fit 2**{n} bits")
    nbytes = ((1 << n) + 7) // 8
    raw = np.frombuffer(value.to_bytes(nbytes, "little"), dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")[: 1 << n]
    return make_from_table(n, bits, cap=cap)


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


def dictator(n: int, i: int) -> BooleanFunction:
    """f(x) = x_i."""
    if not 1 <= i <= n:
        raise ValueError(f"coordinate {i} out of range for arity {n}")
    points = np.arange(1 << n, dtype=np.uint32)
    return make_from_table(n, (points >> (i - 1)) & 1)


def and_all(n: int) -> BooleanFunction:
    table = np.zeros(1 << n, dtype=np.uint8)
    table[-1] = 1
    return make_from_table(n, table)


def or_all(n: int) -> BooleanFunction:
    table = np.ones(1 << n, dtype=np.uint8)
    table[0] = 0
    return make_from_table(n, table)


def majority(n: int) -> BooleanFunction:
    if n % 2 == 0:
        raise ValueError("majority requires odd arity")
    return make_from_table(n, popcounts(n) >= (n + 1) // 2)


def parity(n: int) -> BooleanFunction:
    return make_from_table(n, popcounts(n) % 2)


def tribes(k: int, m: int) -> BooleanFunction:
    """OR of m disjoint ANDs over consecutive blocks of k coordinates."""
    if k < 1 or m < 1:
        raise ValueError("tribes requires k >= 1 and m >= 1")
    n = k * m
    cap = arity_cap()
    if n > cap:
        raise ValueError(
            f"arity {n} exceeds the dense-table cap {cap}; use a closed-form "
            "family or the Monte Carlo estimators"
        )
    points = np.arange(1 << n, dtype=np.uint64)
    table = np.zeros(1 << n, dtype=np.uint8)
    block = (1 << k) - 1
    for t in range(m):
        mask = np.uint64(block << (t * k))
        table |= ((points & mask) == mask).astype(np.uint8)
    return make_from_table(n, table)


def cyclic_run(n: int, length: int) -> BooleanFunction:
    """1 iff some cyclic run of `length` consecutive coordinates is all ones."""
    if not 1 <= length <= n:
        raise ValueError("run length must satisfy 1 <= length <= n")
    cap = arity_cap()
    if n > cap:
        raise ValueError(
            f"arity {n} exceeds the dense-table cap {cap}; use a closed-form "
            "family or the Monte Carlo estimators"
        )
    points = np.arange(1 << n, dtype=np.uint64)
    bits = [((points >> np.uint64(b)) & np.uint64(1)).astype(np.uint8) for b in range(n)]
    table = np.zeros(1 << n, dtype=np.uint8)
    for start in range(n):
        acc = np.ones(1 << n, dtype=np.uint8)
        for off in range(length):
            acc &= bits[(start + off) % n]
        table |= acc
    return make_from_table(n, table)


# ---------------------------------------------------------------------------
# structural checks
# ---------------------------------------------------------------------------


def is_monotone(f: BooleanFunction) -> bool:
    """True iff raising any single coordinate never lowers f."""
    for b in range(f.n):
        r = f.table.reshape(1 << (f.n - 1 - b), 2, 1 << b)
        if ((r[:, 0, :] == 1) & (r[:, 1, :] == 0)).any():
            return False
    return True


def is_fully_symmetric(f: BooleanFunction) -> bool:
    """True iff f depends on the point only through its Hamming weight."""
    weight = popcounts(f.n)
    for k in range(f.n + 1):
        cls = f.table[weight == k]
        if cls.size and not (cls == cls[0]).all():
            return False
    return True


@dataclass(frozen=True)
class PermutationGenerators:
    """Generating set of coordinate permutations, images 1-based.

    ``perms[g][i-1]`` is the image of coordinate i under generator g.
    """

    n: int
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for perm in self.perms:
            if sorted(perm) != list(range(1, self.n + 1)):
                raise ValueError(f"{perm} is not a permutation of 1..{self.n}")


def permutation_point_map(perm: tuple[int, ...], n: int) -> np.ndarray:
    """Index map sending each point x to the point with permuted coordinates.

    The image point y has y_{perm[i-1]} = x_i.
    """
    points = np.arange(1 << n, dtype=np.uint32)
    out = np.zeros(1 << n, dtype=np.uint32)
    for i in range(1, n + 1):
        out |= ((points >> np.uint32(i - 1)) & np.uint32(1)) << np.uint32(perm[i - 1] - 1)
    return out


def is_invariant(f: BooleanFunction, gens: PermutationGenerators) -> bool:
    if gens.n != f.n:
        raise ValueError("generator arity does not match the function")
    for perm in gens.perms:
        mapped = permutation_point_map(perm, f.n)
        if not (f.table[mapped] == f.table).all():
            return False
    return True


def is_transitive(gens: PermutationGenerators) -> bool:
    """True iff the generated group has a single coordinate orbit.

    Orbit closure under the generators alone suffices because permutations
    are invertible, so generator edges already connect the full orbit.
    """
    parent = list(range(gens.n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for perm in gens.perms:
        for i in range(1, gens.n + 1):
            ra, rb = find(i), find(perm[i - 1])
            if ra != rb:
                parent[ra] = rb
    return len({find(i) for i in range(1, gens.n + 1)}) == 1


def is_invariant_and_transitive(f: BooleanFunction, gens: PermutationGenerators) -> bool:
    return is_invariant(f, gens) and is_transitive(gens)


# ---------------------------------------------------------------------------
# family specs (symbolic descriptions; usable above the dense-table cap)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    """A named function family plus its integer parameters."""

    kind: str
    params: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if self.kind not in FAMILY_NAMES:
            raise ValueError(f"unknown family {self.kind!r}")

    def param(self, key: str) -> int:
        for k, v in self.params:
            if k == key:
                return v
        raise KeyError(key)

    @property
    def arity(self) -> int:
        if self.kind == "tribes":
            return self.param("k") * self.param("m")
        return self.param("n")

    def to_string(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.kind}:{inner}"


_FAMILY_PARAM_ORDER = {
    "dictator": ("n", "i"),
    "and_all": ("n",),
    "or_all": ("n",),
    "majority": ("n",),
    "parity": ("n",),
    "tribes": ("k", "m"),
    "cyclic_run": ("n", "len"),
}


def family_spec(kind: str, **params: int) -> FamilySpec:
    kind = _FAMILY_ALIASES.get(kind, kind)
    order = _FAMILY_PARAM_ORDER.get(kind)
    if order is None:
        raise ValueError(f"unknown family {kind!r}")
    if set(params) != set(order):
        raise ValueError(f"family {kind!r} takes parameters {order}, got {tuple(params)}")
    return FamilySpec(kind, tuple((k, int(params[k])) for k in order))


def parse_family_string(text: str) -> FamilySpec:
    """Parse the ``name:key=val,...`` serialization, e.g. ``tribes:k=2,m=3``."""
    try:
        name, _, rest = text.partition(":")
        params = {}
        if rest:
            for item in rest.split(","):
                key, _, value = item.partition("=")
                params[key] = int(value)
        return family_spec(name, **params)
    except (ValueError, KeyError):
        raise ValueError(f"malformed family string {text!r}")


def build_family(spec: FamilySpec) -> BooleanFunction:
    """Dense truth table for a family instance (subject to the arity cap)."""
    if spec.kind == "dictator":
        return dictator(spec.param("n"), spec.param("i"))
    if spec.kind == "and_all":
        return and_all(spec.param("n"))
    if spec.kind == "or_all":
        return or_all(spec.param("n"))
    if spec.kind == "majority":
        return majority(spec.param("n"))
    if spec.kind == "parity":
        return parity(spec.param("n"))
    if spec.kind == "tribes":
        return tribes(spec.param("k"), spec.param("m"))
    return cyclic_run(spec.param("n"), spec.param("len"))


def family_symmetry(spec: FamilySpec) -> tuple[str | None, PermutationGenerators | None]:
    """Symmetry evidence for a family: ('full', None), ('generators', gens), or (None, None).

    Tribes uses a block rotation plus a cycle inside the first block; together
    they act transitively on coordinates and leave the function invariant.
    """
    if spec.kind in ("and_all", "or_all", "majority", "parity"):
        return "full", None
    if spec.kind == "cyclic_run":
        n = spec.param("n")
        shift = tuple(i % n + 1 for i in range(1, n + 1))
        return "generators", PermutationGenerators(n, (shift,))
    if spec.kind == "tribes":
        k, m = spec.param("k"), spec.param("m")
        n = k * m
        if n == 1:
            return "full", None
        perms = []
        if k > 1:
            block_cycle = tuple(
                (i % k + 1) if i <= k else i for i in range(1, n + 1)
            )
            perms.append(block_cycle)
        if m > 1:
            rotation = tuple((i - 1 + k) % n + 1 for i in range(1, n + 1))
            perms.append(rotation)
        return "generators", PermutationGenerators(n, tuple(perms))
    return None, None


# ---------------------------------------------------------------------------
# seeded random instances (used by the verify suites)
# ---------------------------------------------------------------------------


def random_function(n: int, rng: np.random.Generator) -> BooleanFunction:
    """Uniformly random truth table."""
    return make_from_table(n, rng.integers(0, 2, size=1 << n))


def random_monotone_function(n: int, rng: np.random.Generator) -> BooleanFunction:
    """Random monotone function: union of up-sets of a few random points."""
    seeds = rng.integers(0, 1 << n, size=int(rng.integers(1, 4)))
    points = np.arange(1 << n, dtype=np.uint32)
    table = np.zeros(1 << n, dtype=np.uint8)
    for s in seeds:
        s = np.uint32(s)
        table |= ((points & s) == s).astype(np.uint8)
    return make_from_table(n, table)
