"""Parameter sweeps over (N, u, s), figure reproduction and CSV output."""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import astuple, dataclass, field, fields, replace

import numpy as np

from mazer.model import SystemParams
from mazer.oracle import OracleConfig, solve_coupled_channels
from mazer.scattering import (
    channel_amplitudes_grid,
    channel_probabilities,
    fast_limit_grid,
    slow_limit_grid,
)
from mazer.wavepacket import PacketSpec, averaged_probabilities

MODES = ("exact", "slow_limit", "fast_limit", "averaged", "oracle")
MODE_ALIASES = {"slow": "slow_limit", "fast": "fast_limit"}

CSV_COLUMNS = (
    "n_atoms", "u", "s",
    "p_t1", "p_r1", "p_tj", "p_rj", "p_t0", "p_r0",
    "p1", "pj", "p0", "unitarity_residual",
)  # fmt: skip

FIGURE_S_RANGE = (0.0, 12.0, 1201)


class SweepSpecError(ValueError):
    """Invalid sweep specification; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass(frozen=True)
class SweepSpec:
    n_values: tuple[int, ...]
    u: tuple[float, ...]
    s_range: tuple[float, float, int]
    mode: str = "exact"
    # In averaged mode u_mean is taken from each swept u; only the spread and point count are used.
    packet: PacketSpec | None = None
    oracle_config: OracleConfig | None = None

    def __post_init__(self):
        n_values = tuple(_as_list(self.n_values))
        u_values = tuple(float(v) for v in _as_list(self.u))
        object.__setattr__(self, "n_values", n_values)
        object.__setattr__(self, "u", u_values)
        object.__setattr__(self, "mode", MODE_ALIASES.get(self.mode, self.mode))

        if not n_values:
            raise SweepSpecError("n_values", "at least one atom count is required")
        for n in n_values:
            if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
                raise SweepSpecError("n_values", f"atom counts must be integers >= 1, got {n!r}")
        if not u_values:
            raise SweepSpecError("u", "at least one momentum ratio is required")
        if any(not (v > 0 and math.isfinite(v)) for v in u_values):
            raise SweepSpecError("u", f"all values must be finite and > 0, got {list(u_values)}")
        try:
            start, stop, points = self.s_range
        except (TypeError, ValueError):
            raise SweepSpecError("s_range", "expected (start, stop, points)") from None
        if int(points) != points or points < 2:
            raise SweepSpecError("s_range", f"points must be an integer >= 2, got {points}")
        if not (0 <= start <= stop) or not math.isfinite(stop):
            raise SweepSpecError("s_range", f"need 0 <= start <= stop, got start={start}, stop={stop}")
        object.__setattr__(self, "s_range", (float(start), float(stop), int(points)))

        if self.mode not in MODES:
            raise SweepSpecError("mode", f"must be one of {MODES}, got {self.mode!r}")
        if (self.mode == "averaged") != (self.packet is not None):
            raise SweepSpecError("packet", "a packet is required exactly when mode is 'averaged'")
        if (self.mode == "oracle") != (self.oracle_config is not None):
            raise SweepSpecError("oracle_config", "an oracle config is required exactly when mode is 'oracle'")

    def s_grid(self) -> np.ndarray:
        start, stop, points = self.s_range
        return np.linspace(start, stop, points)


@dataclass(frozen=True)
class SweepRecord:
    n_atoms: int
    u: float
    s: float
    p_t1: float = 0.0
    p_r1: float = 0.0
    p_tj: float = 0.0
    p_rj: float = 0.0
    p_t0: float = 0.0
    p_r0: float = 0.0
    p1: float = 0.0
    pj: float = 0.0
    p0: float = 0.0
    unitarity_residual: float = 0.0

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _as_list(value) -> list:
    if isinstance(value, (list, tuple, np.ndarray)):
        return list(value)
    return [value]


def _records_from_probabilities(n, u, s_grid, probs) -> list[SweepRecord]:
    arrays = [np.broadcast_to(getattr(probs, name), s_grid.shape) for name in CSV_COLUMNS[3:12]]
    residual = np.abs(arrays[6] + arrays[7] + arrays[8] - 1.0)
    rows = np.column_stack(arrays + [residual])
    return [SweepRecord(n, u, float(s), *map(float, row)) for s, row in zip(s_grid, rows)]


def _evaluate_curve(task) -> list[SweepRecord]:
    """All s points for one (n, u) pair; vectorized, so chunking is fixed by the spec."""
    mode, n, u, s_grid, packet = task
    if mode == "exact":
        probs = channel_probabilities(channel_amplitudes_grid(n, u, s_grid))
        return _records_from_probabilities(n, u, s_grid, probs)
    if mode == "averaged":
        probs = averaged_probabilities(replace(packet, u_mean=u), n, s_grid)
        return _records_from_probabilities(n, u, s_grid, probs)
    if mode == "slow_limit":
        p_t1 = slow_limit_grid(n, u, s_grid)
        return [SweepRecord(n, u, float(s), p_t1=float(p)) for s, p in zip(s_grid, p_t1)]
    if mode == "fast_limit":
        p1, pj, p0 = (np.broadcast_to(p, s_grid.shape) for p in fast_limit_grid(n, u, s_grid))
        return [
            SweepRecord(n, u, float(s), p1=float(a), pj=float(b), p0=float(c),
                        unitarity_residual=float(abs(a + b + c - 1.0)))
            for s, a, b, c in zip(s_grid, p1, pj, p0)
        ]  # fmt: skip
    raise ValueError(f"unsupported mode {mode!r}")


def _evaluate_oracle_point(task) -> SweepRecord:
    n, u, s, config = task
    probs = channel_probabilities(solve_coupled_channels(SystemParams(n, u, s), config))
    return _records_from_probabilities(n, u, np.array([s]), probs)[0]


def worker_count() -> int:
    """Worker cap from ``MAZER_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("MAZER_THREADS", "0").strip() or "0"
    try:
        requested = int(raw)
    except ValueError:
        raise SweepSpecError("MAZER_THREADS", f"expected an integer, got {raw!r}") from None
    if requested < 0:
        raise SweepSpecError("MAZER_THREADS", f"must be >= 0, got {requested}")
    return requested or (os.cpu_count() or 1)


def _map(fn, tasks, workers: int, pool: type[Executor]) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with pool(max_workers=min(workers, len(tasks))) as ex:
        return list(ex.map(fn, tasks))


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list[SweepRecord]:
    """Evaluate the Cartesian product of (n, u, s); records sorted by (n, u, s)."""
    workers = worker_count() if workers is None else max(1, workers)
    s_grid = spec.s_grid()
    pairs = [(n, u) for n in sorted(set(spec.n_values)) for u in sorted(set(spec.u))]

    if spec.mode == "oracle":
        tasks = [(n, u, float(s), spec.oracle_config) for n, u in pairs for s in s_grid]
        records = _map(_evaluate_oracle_point, tasks, workers, ProcessPoolExecutor)
    else:
        tasks = [(spec.mode, n, u, s_grid, spec.packet) for n, u in pairs]
        records = [r for chunk in _map(_evaluate_curve, tasks, workers, ThreadPoolExecutor) for r in chunk]
    return sorted(records, key=lambda r: (r.n_atoms, r.u, r.s))


def figure(which: str, workers: int | None = None) -> list[SweepRecord]:
    """Exact-mode data behind the published transmission curves."""
    if which == "fig2":
        specs = [SweepSpec((1, 3, 8, 100), (0.03,), FIGURE_S_RANGE)]
    elif which == "fig3":
        specs = [
            SweepSpec((100,), (1.01,), FIGURE_S_RANGE),
            SweepSpec((2000,), (5.0,), FIGURE_S_RANGE),
        ]
    else:
        raise SweepSpecError("figure", f"expected 'fig2' or 'fig3', got {which!r}")
    records = [r for spec in specs for r in run_sweep(spec, workers)]
    return sorted(records, key=lambda r: (r.n_atoms, r.u, r.s))


def format_value(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(records: list[SweepRecord], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([format_value(v) for v in astuple(rec)])


def records_to_csv(records: list[SweepRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def _parse_list(text: str, cast, name: str) -> list:
    try:
        return [cast(item.strip()) for item in text.split(",") if item.strip()]
    except ValueError:
        raise SweepSpecError(name, f"cannot parse {text!r}") from None


@dataclass
class SweepConfig:
    """Raw key/value settings from a config file, before CLI overrides."""

    values: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> "SweepConfig":
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            parser.read_string("[sweep]\n" + text)
        except configparser.Error as exc:
            raise SweepSpecError("config", str(exc).splitlines()[0]) from None
        return cls(dict(parser["sweep"]))

    @classmethod
    def from_file(cls, path: str) -> "SweepConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    def to_spec(self, **overrides) -> SweepSpec:
        """Build a spec; ``overrides`` (already typed) replace file values when not None."""
        v = self.values
        n_values = overrides.get("n_values") or _parse_list(v.get("n_values", ""), int, "n_values")
        u = overrides.get("u") or _parse_list(v.get("u", ""), float, "u")
        s_range = overrides.get("s_range")
        if s_range is None:
            if "s_range" not in v:
                raise SweepSpecError("s_range", "missing (expected 'start, stop, points')")
            parts = _parse_list(v["s_range"], float, "s_range")
            if len(parts) != 3:
                raise SweepSpecError("s_range", f"expected 3 values, got {len(parts)}")
            s_range = (parts[0], parts[1], parts[2])
        mode = overrides.get("mode") or v.get("mode", "exact")
        mode = MODE_ALIASES.get(mode, mode)

        packet = None
        if mode == "averaged":
            sigma = _parse_list(v.get("u_sigma", "0"), float, "u_sigma")
            points = _parse_list(v.get("quadrature_points", "129"), int, "quadrature_points")
            try:
                packet = PacketSpec(u_mean=1.0, u_sigma=sigma[0], quadrature_points=points[0])
            except (ValueError, IndexError) as exc:
                raise SweepSpecError("packet", str(exc)) from None
        oracle_config = None
        if mode == "oracle":
            steps = _parse_list(v.get("steps", "4096"), int, "steps")
            try:
                oracle_config = OracleConfig(steps=steps[0], method=v.get("oracle_method", "stabilized"))
            except (ValueError, IndexError) as exc:
                raise SweepSpecError("oracle_config", str(exc)) from None
        return SweepSpec(tuple(n_values), tuple(u), s_range, mode, packet, oracle_config)
