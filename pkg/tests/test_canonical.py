import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from areatype import (
    Configuration,
    DegenerateInput,
    Point2,
    PreconditionViolated,
    apply_map,
    area_type,
    canonical_distance,
    canonical_form,
    matching_transform,
    same_area_type,
    stability_check,
)
from areatype.batch import (
    apply_maps,
    sample_disk_configurations,
    sample_unimodular_batch,
)
from tests.conftest import config_from_rows


def test_matching_identity():
    x = Configuration.from_pairs([(1, 0), (0, 1), (0.3, 0.4)])
    g = matching_transform(x, x)
    assert np.allclose(g.as_array(), np.eye(2), atol=1e-15)


def test_matching_rotation():
    x = Configuration.from_pairs([(1, 0), (0, 1)])
    y = Configuration.from_pairs([(0, 1), (-1, 0)])
    g = matching_transform(x, y)
    assert np.allclose(g.as_array(), [[0, -1], [1, 0]], atol=1e-15)
    assert abs(g.det - 1) < 1e-15


def test_matching_recovers_sampled_map(rng):
    n = 10_000
    confs = sample_disk_configurations(n, 2, rng, min_degeneracy=0.25)
    gs = sample_unimodular_batch(2.0, n, rng)
    imgs = apply_maps(gs, confs)
    for i in range(0, n, 97):
        x = config_from_rows(confs[i])
        y = config_from_rows(imgs[i])
        g = matching_transform(x, y)
        assert np.abs(g.as_array() - gs[i]).max() < 1e-7


def test_matching_degenerate_raises():
    x = Configuration.from_pairs([(1, 0), (2, 0), (0, 1)])
    y = Configuration.from_pairs([(1, 0), (0, 1), (1, 1)])
    with pytest.raises(DegenerateInput):
        matching_transform(x, y)
    with pytest.raises(DegenerateInput):
        matching_transform(y, x)


def test_matching_det_is_area_ratio():
    x = Configuration.from_pairs([(1, 0), (0, 1)])
    y = Configuration.from_pairs([(2, 0), (0, 1)])
    g = matching_transform(x, y)
    assert abs(g.det - 2.0) < 1e-12
    assert g.conditioning == 1.0


def test_canonical_form_examples():
    t = canonical_form(Configuration.from_pairs([(1, 0), (0, 5), (2, 3)])).t
    assert t == (5, 2, 3)
    t1 = canonical_form(Configuration.from_pairs([(0, 1), (-1, 0)])).t
    assert t1 == (1,)


def test_canonical_form_orbit_invariance(rng):
    n = 2000
    confs = sample_disk_configurations(n, 3, rng, min_degeneracy=0.25)
    gs = sample_unimodular_batch(2.0, n, rng)
    imgs = apply_maps(gs, confs)
    for i in range(0, n, 53):
        x = config_from_rows(confs[i])
        y = config_from_rows(imgs[i])
        assert canonical_distance(x, y) < 1e-7


def test_canonical_form_exact_idempotence():
    x = Configuration.from_pairs(
        [
            (Fraction(3, 5), Fraction(1, 7)),
            (Fraction(-2, 9), Fraction(4, 5)),
            (Fraction(1, 2), Fraction(-1, 3)),
            (Fraction(5, 6), Fraction(2, 11)),
        ]
    )
    form = canonical_form(x)
    again = canonical_form(form.reconstruct())
    assert again.t == form.t  # exact equality over rationals


@settings(max_examples=100)
@given(
    st.lists(
        st.tuples(
            st.floats(-1, 1, allow_nan=False, allow_infinity=False),
            st.floats(-1, 1, allow_nan=False, allow_infinity=False),
        ),
        min_size=3,
        max_size=5,
    )
)
def test_canonical_form_float_idempotence(pairs):
    conf = Configuration.from_pairs(pairs)
    try:
        form = canonical_form(conf)
    except DegenerateInput:
        return
    again = canonical_form(form.reconstruct())
    assert max(abs(a - b) for a, b in zip(again.t, form.t)) < 1e-10


def test_orbit_completeness_exact():
    # equal canonical forms force the matching map to carry every point over
    x = Configuration.from_pairs([(Fraction(2), Fraction(1)), (Fraction(1), Fraction(1)), (Fraction(0), Fraction(3))])
    g = Fraction(1), Fraction(1), Fraction(0), Fraction(1)  # shear, det 1
    from areatype import UnimodularMap

    y = apply_map(UnimodularMap(*g), x)
    assert canonical_form(x).t == canonical_form(y).t
    h = matching_transform(x, y)
    mapped = apply_map(h, x)
    assert mapped == y


def test_matching_uniqueness_by_perturbation(rng):
    # no other det-1 map nearby reproduces the configuration
    x = config_from_rows(sample_disk_configurations(1, 2, rng, min_degeneracy=0.25)[0])
    g = matching_transform(x, x)
    for _ in range(100):
        d = rng.uniform(-1e-3, 1e-3, 4)
        d -= d.mean() * 0  # keep free perturbation
        ga = np.array([[1 + d[0], d[1]], [d[2], 1 + d[3]]])
        ga /= math.sqrt(abs(np.linalg.det(ga)))
        if np.abs(ga - g.as_array()).max() < 1e-12:
            continue
        from areatype import UnimodularMap

        h = UnimodularMap(ga[0, 0], ga[0, 1], ga[1, 0], ga[1, 1])
        hx = apply_map(h, x)
        residual = np.abs(hx.as_array() - x.as_array()).max()
        assert residual > 0


def test_canonical_distance_examples():
    x = Configuration.from_pairs([(1, 0), (0, 1)])
    assert canonical_distance(x, x) == 0
    y = Configuration.from_pairs([(1, 0), (0, 2)])
    assert canonical_distance(x, y) == 1


def test_canonical_distance_size_mismatch():
    x = Configuration.from_pairs([(1, 0), (0, 1)])
    y = Configuration.from_pairs([(1, 0), (0, 1), (1, 1)])
    with pytest.raises(ValueError):
        canonical_distance(x, y)


def test_same_area_type():
    x = Configuration.from_pairs([(1, 0), (0, 1)])
    assert same_area_type(x, x, 1e-12)
    y = Configuration.from_pairs([(1, 0), (0, 1.1)])
    assert not same_area_type(x, y, 0.05)
    assert same_area_type(x, y, 0.2)
    # degenerate inputs fall back to direct comparison without raising
    d1 = Configuration.from_pairs([(1, 0), (2, 0)])
    d2 = Configuration.from_pairs([(1, 0), (3, 0)])
    assert same_area_type(d1, d2, 1e-9)


def test_same_area_type_orbit(rng):
    confs = sample_disk_configurations(500, 2, rng, min_degeneracy=0.25)
    gs = sample_unimodular_batch(2.0, 500, rng)
    imgs = apply_maps(gs, confs)
    for i in range(0, 500, 29):
        assert same_area_type(config_from_rows(confs[i]), config_from_rows(imgs[i]), 1e-6)


def test_stability_check_self_pair():
    k = 3
    x = config_from_rows(
        sample_disk_configurations(1, k, np.random.default_rng(5), min_degeneracy=0.3)[0]
    )
    rep = stability_check(x, x, c=0.25, eps=0.1)
    assert rep.premise_i_holds and rep.bound_i_satisfied
    assert rep.premise_ii_holds and rep.bound_ii_satisfied
    assert rep.implication_i_ok and rep.implication_ii_ok
    assert math.isclose(rep.premise_i_slack, 0.1)
    assert math.isclose(rep.bound_i_slack, math.sqrt(5 * k) / 0.25 * 0.1)
    assert math.isclose(rep.bound_ii_slack, 0.6)


def test_stability_check_preconditions():
    x = Configuration.from_pairs([(1, 0), (0, 1)])
    big = Configuration.from_pairs([(2, 0), (0, 1)])
    thin = Configuration.from_pairs([(1, 0), (1, 0.01)])
    with pytest.raises(PreconditionViolated):
        stability_check(x, big, c=0.25, eps=0.1)
    with pytest.raises(PreconditionViolated):
        stability_check(thin, x, c=0.25, eps=0.1)
    with pytest.raises(PreconditionViolated):
        stability_check(x, x, c=1.5, eps=0.1)
    with pytest.raises(PreconditionViolated):
        stability_check(x, x, c=0.25, eps=1.5)


def test_stability_report_json_round_trip():
    x = Configuration.from_pairs([(1, 0), (0, 1), (0.2, 0.4)])
    rep = stability_check(x, x, c=0.25, eps=0.01)
    blob = rep.to_json()
    assert blob["premise_i_holds"] is True
    assert blob["implication_ii_ok"] is True
    assert set(blob) >= {
        "max_area_discrepancy",
        "canonical_distance",
        "bound_i",
        "bound_ii",
        "premise_i_slack",
        "bound_ii_slack",
    }


def _perturbed_pairs(rng, n, k, c, eps, scale):
    """Pairs (x, y) with y a small perturbation of x, both c-non-degenerate
    unit-disk configurations."""
    margin = 1 - 2 * scale
    xs = sample_disk_configurations(n, k, rng, min_degeneracy=c + 0.05, max_norm=margin)
    ys = xs + rng.uniform(-scale, scale, xs.shape)
    return xs, ys


def test_stability_direction_i_sampled(rng):
    k, c = 2, 0.25
    for eps in (1e-1, 1e-2):
        xs, ys = _perturbed_pairs(rng, 2000, k, c, eps, scale=0.3 * eps)
        from areatype.batch import area_types, canonical_forms, degeneracies

        premise = np.abs(area_types(xs) - area_types(ys)).max(axis=1) < eps
        ok = (degeneracies(ys) >= c) & premise
        fx, _ = canonical_forms(xs[ok])
        fy, _ = canonical_forms(ys[ok])
        dist = np.sqrt(((fx - fy) ** 2).sum(axis=1))
        assert (dist < math.sqrt(5 * k) / c * eps).all()


def test_stability_direction_ii_sampled(rng):
    k, c = 2, 0.25
    for eps in (1e-1, 1e-2):
        xs, ys = _perturbed_pairs(rng, 2000, k, c, eps, scale=0.05 * eps * c / math.sqrt(5 * k))
        from areatype.batch import area_types, canonical_forms, degeneracies

        ok = degeneracies(ys) >= c
        fx, _ = canonical_forms(xs[ok])
        fy, _ = canonical_forms(ys[ok])
        premise = np.sqrt(((fx - fy) ** 2).sum(axis=1)) < eps
        diff = np.abs(area_types(xs[ok]) - area_types(ys[ok])).max(axis=1)
        assert (diff[premise] < 6 * eps).all()
