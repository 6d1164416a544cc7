import itertools
import math

import numpy as np
import pytest

from areatype import (
    BudgetExceeded,
    InsufficientData,
    LatticeSpec,
    NormalizedKey,
    SymbolicPoint,
    count_area_types_exact_upper,
    count_area_types_float,
    lattice_points,
    scaling_fit,
    t_normalize,
)


def test_t_normalize_examples():
    q = 8
    pts = [SymbolicPoint(5, 3, q), SymbolicPoint(6, 5, q), SymbolicPoint(7, 3, q)]
    key = t_normalize(pts)
    assert key.entries == ((5, 0), (6, 2), (7, 0))

    same = [SymbolicPoint(5, 4, q), SymbolicPoint(6, 4, q)]
    assert t_normalize(same).entries == ((5, 0), (6, 0))


def test_t_normalize_idempotent():
    q = 9
    pts = [SymbolicPoint(5, 2, q), SymbolicPoint(7, 9, q), SymbolicPoint(9, 4, q)]
    key = t_normalize(pts)
    again = t_normalize([SymbolicPoint(r, a, q) for r, a in key.entries])
    assert again == key


def test_t_normalize_rotation_invariance():
    q = 10
    base = [SymbolicPoint(6, 1, q), SymbolicPoint(8, 4, q), SymbolicPoint(10, 2, q)]
    key = t_normalize(base)
    for shift in range(1, 7):
        shifted = [SymbolicPoint(p.r, p.a + shift, q) for p in base if p.a + shift <= q]
        if len(shifted) < len(base):
            break
        assert t_normalize(shifted) == key


def test_t_normalize_mixed_q_rejected():
    with pytest.raises(ValueError):
        t_normalize([SymbolicPoint(2, 0, 4), SymbolicPoint(3, 0, 5)])


def test_normalized_key_validation():
    with pytest.raises(ValueError):
        NormalizedKey(q=4, entries=((2, 1), (3, 2)))  # min offset not 0


def brute_force_key_count(q: int, k: int) -> int:
    pts = lattice_points(LatticeSpec(q, 1.0))
    keys = set()
    for tup in itertools.product(pts, repeat=k + 1):
        keys.add(t_normalize(tup).entries)
    return len(keys)


def test_exact_upper_q2_k1_against_brute_force():
    spec = LatticeSpec(2, 1.0)
    assert count_area_types_exact_upper(spec, 1) == brute_force_key_count(2, 1)


@pytest.mark.parametrize("q,k", [(2, 1), (3, 1), (4, 1), (2, 2), (3, 2)])
def test_exact_upper_matches_brute_force(q, k):
    spec = LatticeSpec(q, 1.0)
    assert count_area_types_exact_upper(spec, k) == brute_force_key_count(q, k)


def test_exact_upper_factorized_oracle():
    # keys factor as (r-tuples) x (offset-tuples with min 0):
    # count = R^(k+1) * ((q+1)^(k+1) - q^(k+1))
    for q, k in [(2, 1), (4, 1), (4, 2), (6, 2), (5, 3)]:
        spec = LatticeSpec(q, 1.0)
        R = spec.q - spec.r_min + 1
        expected = R ** (k + 1) * ((q + 1) ** (k + 1) - q ** (k + 1))
        assert count_area_types_exact_upper(spec, k) == expected


def test_exact_upper_thread_independence():
    spec = LatticeSpec(6, 1.0)
    assert count_area_types_exact_upper(spec, 2, threads=1) == count_area_types_exact_upper(
        spec, 2, threads=4
    )


def test_exact_upper_rejects_k0():
    with pytest.raises(ValueError):
        count_area_types_exact_upper(LatticeSpec(4, 1.0), 0)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        count_area_types_exact_upper(LatticeSpec(10, 1.0), 2, budget=1000)


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv("AREATYPE_BUDGET", "10")
    with pytest.raises(BudgetExceeded):
        count_area_types_exact_upper(LatticeSpec(2, 1.0), 1)
    monkeypatch.setenv("AREATYPE_BUDGET", "1000000")
    assert count_area_types_exact_upper(LatticeSpec(2, 1.0), 1) == 20


def closed_form_signed_areas(q: int) -> set:
    """Snapped distinct wedge values of all ordered lattice pairs, from the
    sine closed form."""
    spec = LatticeSpec(q, 1.0)
    vals = set()
    for p1 in lattice_points(spec):
        for p2 in lattice_points(spec):
            w = (p1.r * p2.r / q ** 2) * math.sin(math.pi * (p2.a - p1.a) / (2 * q))
            vals.add(round(w / 1e-9))
    return vals


def test_float_count_q2_k1_closed_form_oracle():
    spec = LatticeSpec(2, 1.0)
    report = count_area_types_float(spec, 1, tol=1e-9)
    assert report.float_count == len(closed_form_signed_areas(2)) == 13
    assert report.degenerate_excluded == 0
    assert report.exact_upper == 20


def test_float_count_monotone_in_tol():
    spec = LatticeSpec(4, 1.0)
    counts = [
        count_area_types_float(spec, 2, tol=tol).float_count
        for tol in (1e-9, 1e-3, 1e-1, 10.0)
    ]
    assert all(a >= b for a, b in zip(counts, counts[1:]))
    assert counts[-1] <= 8  # huge tolerance collapses to a handful of cells


@pytest.mark.parametrize("q,k", [(2, 1), (3, 1), (4, 2), (6, 2)])
def test_float_below_exact(q, k):
    spec = LatticeSpec(q, 1.0)
    report = count_area_types_float(spec, k, tol=1e-9)
    assert report.float_count <= report.exact_upper


def test_float_degenerate_accounting():
    spec = LatticeSpec(4, 1.0)
    report = count_area_types_float(spec, 2, tol=1e-9)
    # min-angle-zero triples whose first two points share an angle
    pts = lattice_points(spec)
    expected = sum(
        1
        for tup in itertools.product(pts, repeat=3)
        if min(p.a for p in tup) == 0 and tup[0].a == tup[1].a
    )
    assert report.degenerate_excluded == expected


def test_float_thread_independence():
    spec = LatticeSpec(5, 1.0)
    a = count_area_types_float(spec, 2, tol=1e-9, threads=1)
    b = count_area_types_float(spec, 2, tol=1e-9, threads=4)
    assert a == b


def test_count_report_json_round_trip():
    from areatype import CountReport

    rep = count_area_types_float(LatticeSpec(3, 1.0), 1)
    back = CountReport.from_json(rep.to_json())
    assert back == rep


def test_scaling_fit_cubic():
    pts = [(q, 7.0 * q ** 3) for q in (2, 4, 8, 16)]
    fit = scaling_fit(pts)
    assert abs(fit.slope - 3.0) < 1e-9
    assert abs(fit.r2 - 1.0) < 1e-9


def test_scaling_fit_constant():
    fit = scaling_fit([(2, 5.0), (4, 5.0), (8, 5.0)])
    assert abs(fit.slope) < 1e-12


def test_scaling_fit_insufficient():
    with pytest.raises(InsufficientData):
        scaling_fit([(2, 1.0), (4, 2.0)])
    with pytest.raises(InsufficientData):
        scaling_fit([(2, 1.0), (4, 0.0), (8, 2.0)])


def test_exact_count_k2_slope():
    qs = [4, 6, 8, 10, 12]
    counts = [count_area_types_exact_upper(LatticeSpec(q, 1.0), 2) for q in qs]
    fit = scaling_fit(list(zip(qs, counts)))
    assert fit.slope <= 5.3
    assert fit.r2 >= 0.95
