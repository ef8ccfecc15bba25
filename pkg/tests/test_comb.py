import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combspec import (CombLine, Envelope, PumpTone, beat_spacing, harmonics, intermod_lattice,
                      label_line, lattice_indices)

from conftest import REF_PUMPS

pump_f = st.floats(1e6, 1e9)


def test_harmonic_ninth_line():
    sp = harmonics(PumpTone(496.55e6), 16, (4e9, 8e9))
    lines = {ln.n: ln.frequency for ln in sp.lines}
    assert lines[9] == pytest.approx(4.46895e9, abs=1e-3)
    assert min(lines) == 9 and max(lines) == 16
    assert all(ln.m == 0 and ln.labels == ((ln.n, 0),) for ln in sp.lines)


def test_harmonic_unit_pump():
    sp = harmonics(PumpTone(1.0), 3, (0.5, 3.5))
    assert list(sp.frequencies) == [1.0, 2.0, 3.0]


def test_thirteenth_harmonic_reaches_e():
    sp = harmonics(PumpTone(7.4670e9 / 13), 13, (7e9, 8e9))
    assert sp.lines[-1].n == 13 and sp.lines[-1].frequency == pytest.approx(7.4670e9, rel=1e-15)
    assert 7.4670e9 / 13 == pytest.approx(574.385e6, abs=1e3)


def test_empty_band_and_bad_order():
    assert len(harmonics(PumpTone(1e9), 5, (1e12, 2e12))) == 0
    for fn in (lambda: harmonics(PumpTone(1e9), 0, (0, 1)),
               lambda: intermod_lattice(PumpTone(1e9), PumpTone(2e9), 0, (0, 1))):
        with pytest.raises(ValueError):
            fn()
    with pytest.raises(ValueError):
        harmonics(PumpTone(1e9), 3, (2, 1))


@pytest.mark.parametrize("kw", [dict(frequency=0), dict(frequency=-1), dict(frequency=1, amplitude=-0.1)])
def test_pump_invariants(kw):
    with pytest.raises(ValueError):
        PumpTone(**kw)


def test_beat_spacing():
    assert beat_spacing(PumpTone(454e6), PumpTone(455e6)) == 1e6
    assert beat_spacing(PumpTone(3e8), PumpTone(3e8)) == 0
    assert beat_spacing(*map(PumpTone, REF_PUMPS)) == pytest.approx(136.413323e6, abs=1e-3)


def test_beat_cluster_spacing():
    sp = intermod_lattice(PumpTone(454e6), PumpTone(455e6), 12, (4.98e9, 5.02e9))
    f = sp.frequencies
    assert 4.994e9 in f
    assert np.all(np.diff(f) == 1e6)


def test_reference_line_present():
    sp = intermod_lattice(*map(PumpTone, REF_PUMPS), 12, (4.4e9, 4.5e9))
    hit = [ln for ln in sp.lines if (-5, 12) in ln.labels]
    assert len(hit) == 1
    assert hit[0].frequency == pytest.approx(4469.527131e6, abs=1e-3)


def test_equal_pumps_collapse():
    sp = intermod_lattice(PumpTone(1e8), PumpTone(1e8), 4, (0, 1e10))
    np.testing.assert_allclose(sp.frequencies, 1e8 * np.arange(1, 9))
    # every line at k f holds all (n, m) with n + m = k
    assert len(sp.lines[0].labels) == 8  # n in -3..4
    assert all(n + m == 1 for n, m in sp.lines[0].labels)


def test_merge_sums_linear_power():
    sp = intermod_lattice(PumpTone(1e8), PumpTone(1e8), 1, (0, 1e10), Envelope(-100.0))
    two = sp.lines[1]  # 2e8 from (1, 1) only
    one = sp.lines[0]  # 1e8 from (1, 0) and (0, 1)
    assert two.power_dbm == pytest.approx(-100.0)
    assert one.power_dbm == pytest.approx(-100.0 + 10 * np.log10(2))


def test_envelope_tilt():
    sp = harmonics(PumpTone(1e9), 4, (0, 5e9), Envelope(-140.0, -1.0))
    np.testing.assert_allclose([ln.power_dbm for ln in sp.lines], [-141, -142, -143, -144])


@pytest.mark.parametrize("M", [1, 2, 7, 30])
def test_index_count(M):
    idx = lattice_indices(M)
    assert len(idx) == (2 * M + 1) ** 2 - 1
    assert len({tuple(r) for r in idx}) == len(idx)
    assert not np.any(np.all(idx == 0, axis=1))


@given(pump_f, pump_f, st.integers(1, 12))
@settings(max_examples=60)
def test_spectrum_invariants(f1, f2, M):
    sp = intermod_lattice(PumpTone(f1), PumpTone(f2), M, (0, np.inf))
    f = sp.frequencies
    assert np.all(f > 0) and np.all(np.diff(f) > 0)
    labels = [lab for ln in sp.lines for lab in ln.labels]
    assert all(abs(n) <= M and abs(m) <= M for n, m in labels)
    # exactly one of each +/- pair survives, unless its frequency is zero
    ls = set(labels)
    assert all((-n, -m) not in ls for n, m in ls)
    idx = lattice_indices(M)
    zero = np.sum(idx[:, 0] * f1 + idx[:, 1] * f2 == 0)
    assert len(labels) == (len(idx) - zero) // 2


@given(pump_f, pump_f, st.integers(1, 10))
@settings(max_examples=40)
def test_line_frequency_exact(f1, f2, M):
    sp = intermod_lattice(PumpTone(f1), PumpTone(f2), M, (0, np.inf), resolution=1e-9)
    for ln in sp.lines:
        assert ln.frequency == ln.n * f1 + ln.m * f2


@given(pump_f, st.integers(1, 20), st.floats(0, 5e9), st.floats(0, 5e9))
@settings(max_examples=60)
def test_harmonics_equal_silent_second_pump(f, M, a, b):
    band = (min(a, b), max(a, b))
    h = harmonics(PumpTone(f), M, band)
    im = intermod_lattice(PumpTone(f), PumpTone(f * 1.37, amplitude=0.0), M, band)
    assert all(ln.m == 0 for ln in im.lines)
    assert [ln.n for ln in h.lines] == [ln.n for ln in im.lines]
    np.testing.assert_array_equal(h.frequencies, im.frequencies)


def test_label_line_examples():
    assert (11, 0) in label_line(454e6, 455e6, 12, 4.994e9, 1e3)
    hits = label_line(PumpTone(REF_PUMPS[0]), PumpTone(REF_PUMPS[1]), 12, 5396.895368e6, 1e3)
    assert hits == [(12, 1)]
    assert label_line(454e6, 455e6, 12, 4.9945e9, 1.0) == []
    with pytest.raises(ValueError):
        label_line(1, 2, 3, 4, -1)


def test_label_line_order():
    hits = label_line(454e6, 455e6, 12, 4.994e9, 2.5e6)
    res = [abs(n * 454e6 + m * 455e6 - 4.994e9) for n, m in hits]
    assert res == sorted(res)
    assert hits[0] == (11, 0)


def test_combline_default_label():
    assert CombLine(3, -2, 1.0, -100).labels == ((3, -2),)
