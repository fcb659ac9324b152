import math

import numpy as np
import pytest
from scipy.signal import argrelmax

from mazer.oracle import OracleConfig
from mazer.scattering import transmission_extrema
from mazer.sweep import (
    CSV_COLUMNS,
    SweepConfig,
    SweepSpec,
    SweepSpecError,
    figure,
    records_to_csv,
    run_sweep,
)
from mazer.wavepacket import PacketSpec


def curves(records):
    out = {}
    for r in records:
        out.setdefault((r.n_atoms, r.u), []).append(r)
    return out


@pytest.mark.parametrize(
    "kwargs,field",
    [
        (dict(n_values=(), u=(1.0,), s_range=(0, 1, 3)), "n_values"),
        (dict(n_values=(0,), u=(1.0,), s_range=(0, 1, 3)), "n_values"),
        (dict(n_values=(2.5,), u=(1.0,), s_range=(0, 1, 3)), "n_values"),
        (dict(n_values=(2,), u=(0.0,), s_range=(0, 1, 3)), "u"),
        (dict(n_values=(2,), u=(1.0,), s_range=(0, 1, 1)), "s_range"),
        (dict(n_values=(2,), u=(1.0,), s_range=(2, 1, 3)), "s_range"),
        (dict(n_values=(2,), u=(1.0,), s_range=(-1, 1, 3)), "s_range"),
        (dict(n_values=(2,), u=(1.0,), s_range=(0, 1, 3), mode="bogus"), "mode"),
        (dict(n_values=(2,), u=(1.0,), s_range=(0, 1, 3), mode="averaged"), "packet"),
        (dict(n_values=(2,), u=(1.0,), s_range=(0, 1, 3), mode="oracle"), "oracle_config"),
        (dict(n_values=(2,), u=(1.0,), s_range=(0, 1, 3), packet=PacketSpec(1.0, 0.1)), "packet"),
    ],
)
def test_spec_errors_name_field(kwargs, field):
    with pytest.raises(SweepSpecError) as info:
        SweepSpec(**kwargs)
    assert info.value.field == field


def test_single_atom_resonance_point():
    (rec, _) = run_sweep(SweepSpec((1,), 0.03, (math.pi, math.pi, 2)), workers=1)
    assert rec.p_t1 == pytest.approx(0.25, abs=0.05)
    assert rec.unitarity_residual < 1e-10


def test_top_curve_of_fig2_grid():
    records = run_sweep(SweepSpec((100,), 0.03, (0.0, 12.0, 1201)), workers=1)
    assert len(records) == 1201
    assert min(r.p_t1 for r in records) >= 0.97


def test_oracle_mode_matches_exact_on_random_points():
    rng = np.random.default_rng(7)
    for _ in range(10):
        n = int(rng.integers(1, 200))
        u = float(rng.uniform(0.02, 5.0))
        s = float(rng.uniform(0.0, 8.0))
        grid = (s, s, 2)
        exact = run_sweep(SweepSpec((n,), u, grid), workers=1)[0]
        oracle = run_sweep(SweepSpec((n,), u, grid, mode="oracle", oracle_config=OracleConfig()), workers=2)[0]
        diffs = [abs(getattr(exact, c) - getattr(oracle, c)) for c in CSV_COLUMNS[3:12]]
        assert max(diffs) < 1e-6


def test_records_sorted_lexicographically():
    spec = SweepSpec((8, 1, 3), (0.5, 0.03), (0.0, 2.0, 5))
    records = run_sweep(spec, workers=3)
    keys = [(r.n_atoms, r.u, r.s) for r in records]
    assert keys == sorted(keys)
    assert len(records) == 3 * 2 * 5


def test_exact_mode_unitarity_invariant():
    records = run_sweep(SweepSpec((1, 7, 300), (0.03, 1.0, 9.0), (0.0, 30.0, 301)), workers=2)
    assert max(r.unitarity_residual for r in records) < 1e-10


def test_slow_mode_fills_transmission_only():
    records = run_sweep(SweepSpec((8,), 0.03, (0.0, 12.0, 13), mode="slow"), workers=1)
    for r in records:
        assert r.p_r1 == r.p_tj == r.p_rj == r.p_t0 == r.p_r0 == r.p1 == r.pj == r.p0 == 0.0
    # the closed form always reflects the barrier component, so even s = 0 sits on a resonance maximum
    assert records[0].p_t1 == pytest.approx(transmission_extrema(8)[0], abs=1e-15)


def test_fast_mode_fills_state_totals():
    records = run_sweep(SweepSpec((4,), 50.0, (0.0, 12.0, 13), mode="fast"), workers=1)
    for r in records:
        assert r.p_t1 == 0.0
        assert r.p0 == pytest.approx(math.sin(r.s * 2 / 100) ** 2 / 4, abs=1e-15)
        assert r.unitarity_residual < 1e-12


def test_averaged_mode_without_spread_equals_exact():
    grid = (0.0, 6.0, 61)
    exact = run_sweep(SweepSpec((3,), (0.2, 0.7), grid), workers=1)
    avg = run_sweep(SweepSpec((3,), (0.2, 0.7), grid, mode="averaged", packet=PacketSpec(1.0, 0.0)), workers=1)
    assert exact == avg


def test_csv_format():
    text = records_to_csv(run_sweep(SweepSpec((2,), 0.1, (0.0, 1.0, 3)), workers=1))
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[0] == "2"
    assert first[1] == "0.10000000000000001"
    assert float(first[3]) == 1.0


@pytest.mark.parametrize("mode", ["exact", "averaged", "slow_limit", "fast_limit"])
def test_csv_identical_across_worker_counts(mode, monkeypatch):
    packet = PacketSpec(1.0, 0.02) if mode == "averaged" else None
    spec = SweepSpec((1, 3, 8, 100), (0.03, 0.5), (0.0, 12.0, 301), mode=mode, packet=packet)
    serial = records_to_csv(run_sweep(spec, workers=1))
    assert records_to_csv(run_sweep(spec, workers=8)) == serial
    monkeypatch.setenv("MAZER_THREADS", "3")
    assert records_to_csv(run_sweep(spec)) == serial


def test_oracle_csv_identical_across_worker_counts():
    spec = SweepSpec((2, 5), 0.4, (0.0, 3.0, 4), mode="oracle", oracle_config=OracleConfig(steps=512))
    assert records_to_csv(run_sweep(spec, workers=1)) == records_to_csv(run_sweep(spec, workers=4))


def test_bad_thread_setting(monkeypatch):
    monkeypatch.setenv("MAZER_THREADS", "many")
    with pytest.raises(SweepSpecError):
        run_sweep(SweepSpec((2,), 0.1, (0.0, 1.0, 3)))


def test_fig2_shape_and_ordering():
    records = figure("fig2", workers=4)
    by_curve = curves(records)
    assert sorted(by_curve) == [(1, 0.03), (3, 0.03), (8, 0.03), (100, 0.03)]
    p = {n: np.array([r.p_t1 for r in by_curve[(n, 0.03)]]) for n in (1, 3, 8, 100)}
    assert all(len(v) == 1201 for v in p.values())
    for n in p:
        for i in argrelmax(p[n])[0]:
            assert p[100][i] >= p[8][i] >= p[3][i] >= p[1][i]


def test_fig2_n8_maxima_match_extrema_law():
    s = np.linspace(0, 12, 1201)
    p8 = np.array([r.p_t1 for r in figure("fig2") if r.n_atoms == 8])
    q = 8**0.25
    for n in (1, 2, 3):
        window = np.abs(s * q - 2 * math.pi * n) < 0.3
        assert p8[window].max() == pytest.approx(transmission_extrema(8)[0], abs=5e-3)


def test_fig3_large_sample_transparent():
    records = figure("fig3")
    assert sorted(curves(records)) == [(100, 1.01), (2000, 5.0)]
    q = 2000**0.25
    tail = [r.p_t1 for r in records if r.n_atoms == 2000 and r.s * q >= 6]
    assert min(tail) >= 0.995


def test_unknown_figure():
    with pytest.raises(SweepSpecError):
        figure("fig9")


def test_config_text_roundtrip():
    cfg = SweepConfig.from_text(
        """
        # transmission curves
        n_values = 1, 3, 8
        u = 0.03
        s_range = 0, 12, 25
        mode = exact
        """
    )
    spec = cfg.to_spec()
    assert spec.n_values == (1, 3, 8)
    assert spec.u == (0.03,)
    assert spec.s_range == (0.0, 12.0, 25)
    override = cfg.to_spec(mode="averaged", n_values=[100])
    assert override.mode == "averaged"
    assert override.n_values == (100,)
    assert override.packet.u_sigma == 0.0


def test_config_oracle_and_packet_keys():
    cfg = SweepConfig.from_text("n_values=2\nu=0.5\ns_range=0,1,3\nu_sigma=0.05\nquadrature_points=65\nsteps=800")
    assert cfg.to_spec(mode="averaged").packet == PacketSpec(1.0, 0.05, 65)
    assert cfg.to_spec(mode="oracle").oracle_config.steps == 800


@pytest.mark.parametrize(
    "text,field",
    [
        ("n_values=2\nu=0.5", "s_range"),
        ("n_values=2\nu=0.5\ns_range=0,1", "s_range"),
        ("n_values=two\nu=0.5\ns_range=0,1,3", "n_values"),
        ("n_values=2\nu=0.5\ns_range=0,1,3\nmode=oracle\nsteps=10", "oracle_config"),
    ],
)
def test_config_errors(text, field):
    with pytest.raises(SweepSpecError) as info:
        SweepConfig.from_text(text).to_spec()
    assert info.value.field == field
