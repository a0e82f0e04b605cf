import math

import pytest
from hypothesis import given, settings, strategies as st

from slotcavity.dbr import (
    FabryPerot,
    LayerStack,
    airy_q_oracle,
    finesse,
    fp_quality,
    quarter_wave_reflectance,
    quarter_wave_stack,
    reflectivity_spectrum,
    stack_reflectivity,
)
from slotcavity.errors import DegenerateCavity, NoResonanceFound

LAM = 637e-9


def test_empty_stack():
    assert stack_reflectivity(LayerStack(1.5, (), 1.5), LAM) == pytest.approx((0.0, 1.0), abs=1e-15)


def test_fresnel_limit():
    r, t = stack_reflectivity(LayerStack(1.0, (), 2.4), LAM)
    assert r == pytest.approx(((1 - 2.4) / (1 + 2.4)) ** 2, rel=1e-12)
    assert r + t == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("periods", [1, 4, 8, 15])
@pytest.mark.parametrize("ns", [1.0, 1.45, 2.4])
def test_quarter_wave_closed_form(periods, ns):
    stack = quarter_wave_stack(2.4, 1.45, periods, LAM, 1.0, ns)
    r, _ = stack_reflectivity(stack, LAM)
    assert abs(r - quarter_wave_reflectance(2.4, 1.45, periods, 1.0, ns)) < 1e-10


def test_half_wave_layer_is_absent():
    stack = LayerStack(1.0, ((2.0, LAM / 4),), 1.0)  # half-wave optical thickness
    assert stack_reflectivity(stack, LAM)[0] == pytest.approx(0.0, abs=1e-14)


layers = st.lists(st.tuples(st.floats(1.0, 4.0), st.floats(1e-9, 1e-6)), max_size=12)


@settings(max_examples=80, deadline=None)
@given(layers, st.floats(1.0, 3.0), st.floats(1.0, 3.0), st.floats(300e-9, 2000e-9))
def test_energy_conservation(ls, n0, ns, lam):
    r, t = stack_reflectivity(LayerStack(n0, tuple(ls), ns), lam)
    assert abs(r + t - 1.0) < 1e-12
    assert 0 <= r <= 1


@settings(max_examples=50, deadline=None)
@given(layers, st.floats(1.0, 3.0), st.floats(300e-9, 2000e-9))
def test_symmetric_stack_reversal(ls, n, lam):
    sym = tuple(ls) + tuple(reversed(ls))
    a = stack_reflectivity(LayerStack(n, sym, n), lam)[0]
    b = stack_reflectivity(LayerStack(n, sym, n).reversed(), lam)[0]
    assert a == pytest.approx(b, abs=1e-12)


def test_spectrum_rows():
    rows = reflectivity_spectrum(quarter_wave_stack(2.4, 1.45, 6, LAM), [500e-9, 637e-9, 800e-9])
    assert rows.shape == (3, 3)
    assert all(abs(r + t - 1) < 1e-12 for _, r, t in rows)


def test_stack_validation():
    with pytest.raises(ValueError):
        LayerStack(0.5, (), 1.0)
    with pytest.raises(ValueError):
        LayerStack(1.0, ((1.5, 0.0),), 1.0)
    with pytest.raises(ValueError):
        stack_reflectivity(LayerStack(1.0), 0.0)


def test_finesse_values():
    assert finesse(0.994, 0.994) == pytest.approx(5.2e2, rel=0.01)
    assert finesse(0.0, 0.0) == 0.0
    with pytest.raises(DegenerateCavity):
        finesse(1.0, 0.9)


def test_fundamental_order():
    fp = FabryPerot(0.99, 0.99, LAM / (2 * 1.3), 1.3)
    f, q = fp_quality(fp, LAM)
    assert fp.order(LAM) == pytest.approx(1.0)
    assert q == pytest.approx(f)


def test_order_52_gives_high_q():
    fp = FabryPerot(0.994, 0.994, 52 * LAM / 2, 1.0)
    f, q = fp_quality(fp, LAM)
    assert q == pytest.approx(27000, rel=0.02)


@pytest.mark.parametrize("r", [0.9, 0.95, 0.994, 0.9999])
@pytest.mark.parametrize("order", [1, 7, 52])
def test_airy_scan_matches_qf(r, order):
    fp = FabryPerot(r, r, order * LAM / (2 * 1.4), 1.4)
    _, q = fp_quality(fp, LAM)
    assert airy_q_oracle(fp, LAM) == pytest.approx(q, rel=0.05)


def test_airy_low_finesse_is_only_rough():
    fp = FabryPerot(0.5, 0.5, 5 * LAM / 2, 1.0)
    _, q = fp_quality(fp, LAM)
    assert airy_q_oracle(fp, LAM) == pytest.approx(q, rel=0.25)


def test_airy_with_stack_reflectivity():
    stack = quarter_wave_stack(2.4, 1.45, 10, LAM)
    r0 = stack_reflectivity(stack, LAM)[0]
    fp = FabryPerot(r0, r0, 20 * LAM / 2, 1.0)
    q_scan = airy_q_oracle(fp, LAM, lambda lam: stack_reflectivity(stack, lam)[0])
    assert q_scan == pytest.approx(fp_quality(fp, LAM)[1], rel=0.05)


def test_no_resonance():
    fp = FabryPerot(0.9, 0.9, LAM / 2, 1.0)
    with pytest.raises(NoResonanceFound):
        airy_q_oracle(fp, LAM, band=(LAM * 0.7, LAM * 0.9))
    with pytest.raises(NoResonanceFound):
        airy_q_oracle(FabryPerot(0.0, 0.0, LAM, 1.0), LAM)


def test_doubling_length_doubles_q():
    a = FabryPerot(0.99, 0.99, 10 * LAM / 2, 1.0)
    b = FabryPerot(0.99, 0.99, 20 * LAM / 2, 1.0)
    assert fp_quality(b, LAM)[1] == pytest.approx(2 * fp_quality(a, LAM)[1])
    assert airy_q_oracle(b, LAM) == pytest.approx(2 * airy_q_oracle(a, LAM), rel=0.01)


@settings(max_examples=60, deadline=None)
@given(
    r1=st.floats(0.01, 0.999),
    r2=st.floats(0.01, 0.999),
    dr=st.floats(1e-4, 1e-3),
    length=st.floats(1e-7, 1e-4),
)
def test_q_increases_with_r_and_length(r1, r2, dr, length):
    base = fp_quality(FabryPerot(r1, r2, length, 1.0), LAM)[1]
    assert fp_quality(FabryPerot(min(r1 + dr, 0.9999), r2, length, 1.0), LAM)[1] > base
    assert fp_quality(FabryPerot(r1, min(r2 + dr, 0.9999), length, 1.0), LAM)[1] > base
    assert fp_quality(FabryPerot(r1, r2, 1.1 * length, 1.0), LAM)[1] > base


def test_fp_validation():
    with pytest.raises(ValueError):
        FabryPerot(1.2, 0.5, LAM, 1.0)
    with pytest.raises(ValueError):
        FabryPerot(0.5, 0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        FabryPerot(0.5, 0.5, LAM, 0.9)
    assert math.isfinite(fp_quality(FabryPerot(0.0, 0.0, LAM, 1.0), LAM)[1])
