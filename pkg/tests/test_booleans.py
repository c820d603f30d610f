"""Truth tables, families, encodings, and symmetry evidence.

Oracles here are deliberately dumb: per-point Python loops over explicit
bit strings, compared against the vectorized implementations.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biascube.booleans import (
    arity_cap,
    and_all,
    build_family,
    coordinate,
    cyclic_run,
    dictator,
    family_spec,
    family_symmetry,
    is_fully_symmetric,
    is_invariant,
    is_invariant_and_transitive,
    is_monotone,
    is_transitive,
    majority,
    make_from_table,
    or_all,
    parity,
    parse_family_string,
    parse_table_string,
    permutation_point_map,
    popcounts,
    PermutationGenerators,
    random_monotone_function,
    tribes,
    with_coordinate,
)


def bits_of(x: int, n: int) -> list[int]:
    return [(x >> (i - 1)) & 1 for i in range(1, n + 1)]


def test_popcounts_matches_bin():
    for n in (0, 1, 3, 7):
        expected = [bin(x).count("1") for x in range(1 << n)]
        assert popcounts(n).tolist() == expected


def test_coordinate_is_lsb_first():
    # x = 0b0110 has coordinates (0, 1, 1, 0) in order 1..4
    assert [coordinate(6, i) for i in (1, 2, 3, 4)] == [0, 1, 1, 0]
    assert with_coordinate(6, 1, 1) == 7
    assert with_coordinate(6, 2, 0) == 4


@given(st.integers(0, 255), st.integers(1, 8), st.integers(0, 1))
def test_with_coordinate_roundtrip(x, i, v):
    assert coordinate(with_coordinate(x, i, v), i) == v


class TestFamilies:
    def test_or_and_tables(self):
        f, g = or_all(3), and_all(3)
        for x in range(8):
            assert f.table[x] == (1 if x else 0)
            assert g.table[x] == (1 if x == 7 else 0)

    def test_dictator_reads_one_bit(self):
        f = dictator(4, 3)
        for x in range(16):
            assert f.table[x] == coordinate(x, 3)

    def test_majority_by_weight(self):
        f = majority(5)
        for x in range(32):
            assert f.table[x] == (1 if bin(x).count("1") >= 3 else 0)

    def test_majority_rejects_even_arity(self):
        with pytest.raises(ValueError):
            majority(4)

    def test_parity_by_weight(self):
        f = parity(4)
        for x in range(16):
            assert f.table[x] == bin(x).count("1") % 2

    def test_tribes_block_oracle(self):
        k, m = 2, 3
        f = tribes(k, m)
        for x in range(1 << (k * m)):
            b = bits_of(x, k * m)
            blocks = [all(b[j * k : (j + 1) * k]) for j in range(m)]
            assert f.table[x] == int(any(blocks))

    def test_cyclic_run_wraps(self):
        f = cyclic_run(5, 2)
        for x in range(32):
            b = bits_of(x, 5)
            hit = any(b[j] and b[(j + 1) % 5] for j in range(5))
            assert f.table[x] == int(hit)

    def test_cyclic_run_length_bounds(self):
        with pytest.raises(ValueError):
            cyclic_run(4, 0)
        with pytest.raises(ValueError):
            cyclic_run(4, 5)

    def test_monotonicity_flags(self):
        assert is_monotone(or_all(4))
        assert is_monotone(and_all(4))
        assert is_monotone(majority(5))
        assert is_monotone(tribes(2, 3))
        assert is_monotone(cyclic_run(5, 2))
        assert not is_monotone(parity(3))

    def test_full_symmetry(self):
        assert is_fully_symmetric(majority(5))
        assert is_fully_symmetric(parity(4))
        assert not is_fully_symmetric(dictator(3, 1))
        assert not is_fully_symmetric(tribes(2, 2))


class TestSerialization:
    def test_parse_table_or2(self):
        f = parse_table_string("n=2:hex=E")
        assert f.table.tolist() == [0, 1, 1, 1]

    def test_parse_table_rejects_garbage(self):
        for bad in ("n=2", "hex=E", "n=two:hex=E", "n=2:hex=ZZ"):
            with pytest.raises(ValueError):
                parse_table_string(bad)

    def test_parse_table_rejects_overflow(self):
        # 2**2 bits admit at most 0xF
        with pytest.raises(ValueError):
            parse_table_string("n=2:hex=1F")

    @given(st.integers(1, 6), st.randoms(use_true_random=False))
    @settings(max_examples=60, deadline=None)
    def test_table_string_roundtrip(self, n, rnd):
        bits = [rnd.randint(0, 1) for _ in range(1 << n)]
        value = sum(b << j for j, b in enumerate(bits))
        f = parse_table_string(f"n={n}:hex={value:X}")
        assert f.table.tolist() == bits

    def test_family_string_roundtrip(self):
        for text in ("or_all:n=8", "tribes:k=2,m=3", "cyclic_run:n=5,len=2"):
            spec = parse_family_string(text)
            assert spec.to_string() == text
            build_family(spec)

    def test_family_aliases(self):
        assert family_spec("or", n=4).kind == "or_all"
        assert family_spec("and", n=4).kind == "and_all"

    def test_family_param_validation(self):
        with pytest.raises(ValueError):
            family_spec("tribes", n=4)
        with pytest.raises(ValueError):
            family_spec("nosuch", n=4)
        with pytest.raises(ValueError):
            parse_family_string("tribes:k=2")


class TestSymmetryEvidence:
    def test_dictator_under_shift(self):
        n = 4
        shift = tuple(i % n + 1 for i in range(1, n + 1))
        gens = PermutationGenerators(n, (shift,))
        f = dictator(n, 1)
        assert not is_invariant(f, gens)
        assert is_transitive(gens)
        assert not is_invariant_and_transitive(f, gens)

    def test_cyclic_run_under_shift(self):
        n = 5
        shift = tuple(i % n + 1 for i in range(1, n + 1))
        gens = PermutationGenerators(n, (shift,))
        assert is_invariant_and_transitive(cyclic_run(n, 2), gens)

    def test_family_symmetry_kinds(self):
        assert family_symmetry(family_spec("or_all", n=6))[0] == "full"
        assert family_symmetry(family_spec("dictator", n=6, i=2)) == (None, None)
        mode, gens = family_symmetry(family_spec("tribes", k=2, m=3))
        assert mode == "generators"
        assert is_transitive(gens)
        assert is_invariant(tribes(2, 3), gens)
        mode, gens = family_symmetry(family_spec("cyclic_run", n=6, len=3))
        assert mode == "generators"
        assert is_invariant_and_transitive(cyclic_run(6, 3), gens)

    def test_permutation_map_permutes_bits(self):
        # swap coordinates 1 and 2 on n = 3
        mapping = permutation_point_map((2, 1, 3), 3)
        for x in range(8):
            b = bits_of(x, 3)
            y = b[1] | (b[0] << 1) | (b[2] << 2)
            assert mapping[x] == y


def test_random_monotone_is_monotone():
    rng = np.random.default_rng(7)
    for _ in range(25):
        f = random_monotone_function(int(rng.integers(2, 7)), rng)
        assert is_monotone(f)


def test_arity_cap_env(monkeypatch):
    monkeypatch.setenv("BIASCUBE_MAX_ARITY", "6")
    assert arity_cap() == 6
    with pytest.raises(ValueError):
        make_from_table(7, np.zeros(128, dtype=np.uint8))
    monkeypatch.setenv("BIASCUBE_MAX_ARITY", "0")
    with pytest.raises(ValueError):
        arity_cap()
