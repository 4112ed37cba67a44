"""Experiment presets, config parsing, file formats, and the CLI."""

import argparse
import os
import struct
import sys
from dataclasses import dataclass

import numpy as np

from bgk_lowrank import diagnostics, integrators
from bgk_lowrank.bgk import BgkParams, moments_dense
from bgk_lowrank.grid import ProductGrid, make_axis
from bgk_lowrank.lowrank import LowRankState, cross_compress, evaluate, pad_rank

EXPERIMENTS = (
    "toy1d1v",
    "shear2d2v",
    "shear3d3v",
    "explosion2d2v",
    "explosion3d3v",
    "custom",
)
INTEGRATORS = ("ips", "buc", "ops", "bug", "dense")


class ConfigError(ValueError):
    """Invalid configuration; collects every violation found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class RunConfig:
    experiment: str
    x_axes: list  # [(lower, upper, n), ...]
    v_axes: list
    epsilon: float = 1.0
    integrator: str = "buc"
    rank: int = 10
    theta: float = 1e-6
    rank_min: int = 1
    rank_max: int = 64
    dt: float = 1e-3
    t_final: float = 1.0
    scheme: str = "rk4"
    snapshot_every: float = 0.1
    checkpoint_every: float = 1.0
    output: str = "out"
    seed: int = 0
    positivity: str = "error"
    x0: float = 0.0
    v0: float = 0.1
    shear_width: float = 1.0 / 30.0
    perturbation: float = 5e-3
    alpha: float = 0.25
    sigma: float = 0.25
    cross_tol: float = 1e-10
    record_timings: bool = True

    def validate(self):
        errors = []
        if self.experiment not in EXPERIMENTS:
            errors.append(f"experiment: unknown {self.experiment!r}")
        if self.integrator not in INTEGRATORS:
            errors.append(f"integrator: unknown {self.integrator!r}")
        if self.dt <= 0:
            errors.append("dt: must be positive")
        if self.t_final < 0:
            errors.append("t_final: must be non-negative")
        if self.theta < 0:
            errors.append("theta: must be non-negative")
        if self.rank < 1:
            errors.append("rank: must be >= 1")
        if self.rank_min < 1 or self.rank_max < self.rank_min:
            errors.append("rank_min/rank_max: need 1 <= rank_min <= rank_max")
        if self.scheme not in ("rk4", "euler"):
            errors.append(f"scheme: unknown {self.scheme!r}")
        if self.positivity not in ("error", "clamp"):
            errors.append(f"positivity: unknown {self.positivity!r}")
        if not self.x_axes or not self.v_axes:
            errors.append("axes: x and v axes are required")
        for name, axes in (("x", self.x_axes), ("v", self.v_axes)):
            for i, (lo, hi, n) in enumerate(axes):
                if hi <= lo:
                    errors.append(f"{name}.{i}: upper must exceed lower")
                if n < 2 or n % 2 != 0:
                    errors.append(f"{name}.{i}.n: must be even and >= 2")
        if errors:
            raise ConfigError(errors)
        return self


_DEFAULTS = {
    # grid and physics defaults per experiment preset
    "toy1d1v": dict(
        x_axes=[(-6.0, 6.0, 128)], v_axes=[(-6.0, 6.0, 128)],
        epsilon=1.0, dt=1e-3, t_final=10.0, integrator="ips", rank=10,
        theta=1e-6, rank_max=16,
    ),
    "shear2d2v": dict(
        x_axes=[(0.0, 1.0, 128)] * 2, v_axes=[(-6.0, 6.0, 16)] * 2,
        epsilon=1e-4, dt=1e-4, t_final=12.0, integrator="buc", rank=12,
        theta=1e-6, rank_max=64, v0=0.1, shear_width=1.0 / 30.0,
        perturbation=5e-3,
    ),
    "shear3d3v": dict(
        x_axes=[(0.0, 1.0, 100), (-1.0, 1.0, 100), (-1.0, 1.0, 100)],
        v_axes=[(-6.0, 6.0, 16)] * 3,
        epsilon=5e-4, dt=1e-3, t_final=15.0, integrator="buc", rank=16,
        theta=1e-5, rank_max=64, v0=0.1, shear_width=1.0 / 30.0,
        perturbation=1e-3,
    ),
    "explosion2d2v": dict(
        x_axes=[(-3.0, 3.0, 128)] * 2, v_axes=[(-6.0, 6.0, 32)] * 2,
        epsilon=10.0, dt=1e-3, t_final=0.75, integrator="buc", rank=1,
        theta=1e-6, rank_max=128,
    ),
    "explosion3d3v": dict(
        x_axes=[(-3.0, 3.0, 256)] * 3, v_axes=[(-6.0, 6.0, 32)] * 3,
        epsilon=1e-3, dt=1e-3, t_final=1.0, integrator="buc", rank=1,
        theta=1e-4, rank_max=64,
    ),
    "custom": dict(),
}

# fixed-rank defaults from the shear-flow experiments differ by integrator
_SHEAR2D2V_IPS_RANK = 32

_STR_KEYS = {"experiment", "integrator", "scheme", "positivity", "output"}
_INT_KEYS = {"rank", "rank_min", "rank_max", "seed"}
_BOOL_KEYS = {"record_timings"}
_FLOAT_KEYS = {
    "epsilon", "theta", "dt", "t_final", "snapshot_every", "checkpoint_every",
    "x0", "v0", "shear_width", "perturbation", "alpha", "sigma", "cross_tol",
}


def _parse_value(key, raw, line_no, errors):
    if key in _STR_KEYS:
        return raw
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _BOOL_KEYS:
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError:
        errors.append(f"line {line_no}: invalid value {raw!r} for {key}")
        return None
    errors.append(f"line {line_no}: unknown key {key!r}")
    return None


def parse_config(text, overrides=None):
    """Parse the line-oriented `key = value` format into a RunConfig.

    Dotted axis keys (`x.0.lower = 0`) describe per-axis grids.  Unknown
    keys are rejected; every violation is reported at once.
    """
    errors = []
    flat = {}
    axes = {"x": {}, "v": {}}
    for line_no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            errors.append(f"line {line_no}: expected `key = value`")
            continue
        key, raw = (part.strip() for part in body.split("=", 1))
        parts = key.split(".")
        if len(parts) == 3 and parts[0] in axes:
            space, idx_s, attr = parts
            if attr not in ("lower", "upper", "n"):
                errors.append(f"line {line_no}: unknown axis key {key!r}")
                continue
            try:
                idx = int(idx_s)
                val = int(raw) if attr == "n" else float(raw)
            except ValueError:
                errors.append(f"line {line_no}: invalid value {raw!r} for {key}")
                continue
            axes[space].setdefault(idx, {})[attr] = val
        elif len(parts) == 1:
            val = _parse_value(key, raw, line_no, errors)
            if val is not None:
                flat[key] = val
        else:
            errors.append(f"line {line_no}: unknown key {key!r}")
    if overrides:
        flat.update({k: v for k, v in overrides.items() if v is not None})
    if "experiment" not in flat or not flat.get("experiment"):
        errors.append("experiment: required")
    if errors:
        raise ConfigError(errors)

    def build_axes(space):
        spec = axes[space]
        out = []
        for i in sorted(spec):
            a = spec[i]
            missing = {"lower", "upper", "n"} - set(a)
            if missing:
                errors.append(f"{space}.{i}: missing {sorted(missing)}")
            else:
                out.append((a["lower"], a["upper"], a["n"]))
        return out

    x_axes = build_axes("x")
    v_axes = build_axes("v")
    if errors:
        raise ConfigError(errors)

    defaults = dict(_DEFAULTS.get(flat["experiment"], {}))
    if (
        flat["experiment"] == "shear2d2v"
        and "rank" not in flat
        and flat.get("integrator", defaults.get("integrator")) == "ips"
    ):
        defaults["rank"] = _SHEAR2D2V_IPS_RANK
    merged = {**defaults, **flat}
    if x_axes:
        merged["x_axes"] = x_axes
    if v_axes:
        merged["v_axes"] = v_axes
    merged.setdefault("x_axes", [])
    merged.setdefault("v_axes", [])
    try:
        cfg = RunConfig(**merged)
    except TypeError as exc:
        raise ConfigError([str(exc)])
    return cfg.validate()


def serialize_config(cfg):
    lines = [f"experiment = {cfg.experiment}"]
    for space, axes in (("x", cfg.x_axes), ("v", cfg.v_axes)):
        for i, (lo, hi, n) in enumerate(axes):
            lines.append(f"{space}.{i}.lower = {lo:.17g}")
            lines.append(f"{space}.{i}.upper = {hi:.17g}")
            lines.append(f"{space}.{i}.n = {n}")
    for key in sorted(_STR_KEYS - {"experiment"}):
        lines.append(f"{key} = {getattr(cfg, key)}")
    for key in sorted(_INT_KEYS):
        lines.append(f"{key} = {getattr(cfg, key)}")
    for key in sorted(_BOOL_KEYS):
        lines.append(f"{key} = {str(getattr(cfg, key)).lower()}")
    for key in sorted(_FLOAT_KEYS):
        lines.append(f"{key} = {getattr(cfg, key):.17g}")
    return "\n".join(lines) + "\n"


def build_grids(cfg):
    x_grid = ProductGrid([make_axis(*axis) for axis in cfg.x_axes])
    v_grid = ProductGrid([make_axis(*axis) for axis in cfg.v_axes])
    return x_grid, v_grid


def build_params(cfg, x_grid=None, v_grid=None):
    if x_grid is None:
        x_grid, v_grid = build_grids(cfg)
    return BgkParams(
        x_grid=x_grid, v_grid=v_grid, epsilon=cfg.epsilon,
        positivity=cfg.positivity,
    )


def _shear_velocity_fields(cfg, x_grid):
    """Initial bulk velocity fields for the shear presets (rho = T = 1)."""
    if cfg.experiment == "shear2d2v":
        x1 = x_grid.coordinate(0)
        x2 = x_grid.coordinate(1)
        u1 = cfg.v0 * np.where(
            x2 <= 0.5,
            np.tanh((x2 - 0.25) / cfg.shear_width),
            np.tanh((0.75 - x2) / cfg.shear_width),
        )
        u2 = cfg.perturbation * np.sin(2.0 * np.pi * x1)
        return np.stack([u1, u2])
    x1 = x_grid.coordinate(0)
    x2 = x_grid.coordinate(1)
    x3 = x_grid.coordinate(2)
    r2 = x2**2 + x3**2
    theta = np.arctan2(x3, x2)
    u1 = cfg.v0 * np.tanh((0.25 - r2) / cfg.shear_width)
    u2 = cfg.perturbation * np.sin(2.0 * np.pi * x1) * np.cos(theta)
    u3 = cfg.perturbation * np.sin(2.0 * np.pi * x1) * np.sin(theta)
    return np.stack([u1, u2, u3])


def _maxwellian_oracle(u_fields, v_grid):
    """Pointwise oracle for a unit-density, unit-temperature Maxwellian with
    the given bulk-velocity fields; accepts broadcastable index arrays."""
    d = u_fields.shape[0]
    pref = 1.0 / (2.0 * np.pi) ** (0.5 * d)
    vcoords = [v_grid.coordinate(i) for i in range(d)]

    def oracle(i, j):
        i = np.asarray(i)
        j = np.asarray(j)
        q = 0.0
        for l in range(d):
            diff = vcoords[l][j] - u_fields[l][i]
            q = q + diff * diff
        return pref * np.exp(-0.5 * q)

    return oracle


def initial_condition(cfg, x_grid=None, v_grid=None):
    """Build the preset initial LowRankState on the configured grids."""
    if x_grid is None:
        x_grid, v_grid = build_grids(cfg)
    exp = cfg.experiment
    if exp == "toy1d1v":
        x = x_grid.coordinate(0)
        v = v_grid.coordinate(0)
        gx = 1.0 + np.exp(-0.5 * (x - cfg.x0) ** 2)
        gv = np.exp(-0.5 * v**2) / np.sqrt(2.0 * np.pi)
        m = (x_grid.weight * gx.sum()) * (v_grid.weight * gv.sum())
        state = LowRankState(
            gx[:, None], np.array([[1.0 / m]]), gv[:, None]
        )
        return pad_rank(_orthonormalize_rank1(state), cfg.rank, cfg.seed)
    if exp in ("shear2d2v", "shear3d3v"):
        u_fields = _shear_velocity_fields(cfg, x_grid)
        oracle = _maxwellian_oracle(u_fields, v_grid)
        state = cross_compress(
            oracle, x_grid.size, v_grid.size, tol=cfg.cross_tol,
            r_max=cfg.rank, seed=cfg.seed,
        )
        if not state.tolerance_met:
            print(
                "warning: cross approximation tolerance not met at "
                f"rank {state.rank}", file=sys.stderr,
            )
        if cfg.integrator in ("ips", "ops") and state.rank < cfg.rank:
            state = pad_rank(state, cfg.rank, cfg.seed)
        return state
    if exp in ("explosion2d2v", "explosion3d3v"):
        gx = np.ones(x_grid.size)
        bump = np.ones(x_grid.size)
        for i in range(x_grid.ndim):
            bump = bump * np.exp(
                -x_grid.coordinate(i) ** 2 / (2.0 * cfg.sigma**2)
            )
        gx = gx + cfg.alpha * bump
        gv = np.ones(v_grid.size)
        for i in range(v_grid.ndim):
            gv = gv * np.exp(-0.5 * v_grid.coordinate(i) ** 2)
        m = (x_grid.weight * gx.sum()) * (v_grid.weight * gv.sum())
        state = LowRankState(gx[:, None], np.array([[1.0 / m]]), gv[:, None])
        state = _orthonormalize_rank1(state)
        if cfg.integrator in ("ips", "ops") and cfg.rank > 1:
            state = pad_rank(state, cfg.rank, cfg.seed)
        return state
    raise ConfigError([f"experiment {exp!r} has no preset initial condition"])


def _orthonormalize_rank1(state):
    nx = np.linalg.norm(state.X[:, 0])
    nv = np.linalg.norm(state.V[:, 0])
    return LowRankState(
        state.X / nx,
        state.S * (nx * nv),
        state.V / nv,
        x_orthonormal=True,
        v_orthonormal=True,
    )


def make_stepper(cfg, params):
    scheme = integrators.SubstepScheme(cfg.scheme)
    if cfg.integrator == "ips":
        return integrators.IpsStepper(params, scheme, seed=cfg.seed)
    if cfg.integrator == "buc":
        parallel = integrators._worker_count() >= 2
        return integrators.BucStepper(
            params, scheme, theta=cfg.theta, r_min=cfg.rank_min,
            r_max=cfg.rank_max, parallel=parallel, seed=cfg.seed,
        )
    if cfg.integrator == "ops":
        return integrators.OpsStepper(params, scheme, seed=cfg.seed)
    if cfg.integrator == "bug":
        return integrators.BugStepper(
            params, scheme, theta=cfg.theta, r_min=cfg.rank_min,
            r_max=cfg.rank_max, seed=cfg.seed,
        )
    if cfg.integrator == "dense":
        return integrators.DenseStepper(params, scheme)
    raise ConfigError([f"integrator: unknown {cfg.integrator!r}"])


# ---------------------------------------------------------------------------
# binary snapshot / checkpoint format
# ---------------------------------------------------------------------------

MAGIC = b"DLRK"
FORMAT_VERSION = 1
KIND_FIELD = 1
KIND_FACTORS = 2


def save_field(path, snapshot):
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<BB", KIND_FIELD, len(snapshot.shape)))
        for n in snapshot.shape:
            fh.write(struct.pack("<Q", n))
        fh.write(np.ascontiguousarray(snapshot.values, dtype="<f8").tobytes())


def save_checkpoint(path, state, x_grid, v_grid):
    axes = list(x_grid.axes) + list(v_grid.axes)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<BB", KIND_FACTORS, len(axes)))
        for ax in axes:
            fh.write(struct.pack("<Q", ax.n))
        for ax in axes:
            fh.write(struct.pack("<ddQ", ax.lower, ax.upper, ax.n))
        fh.write(
            struct.pack(
                "<QQQ", state.X.shape[0], state.rank, state.V.shape[0]
            )
        )
        for M in (state.X, state.S, state.V):
            fh.write(np.ascontiguousarray(M, dtype="<f8").tobytes())


def read_header(path):
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError(f"{path}: not a DLRK file (magic {magic!r})")
        version = struct.unpack("<I", fh.read(4))[0]
        kind, ndim = struct.unpack("<BB", fh.read(2))
        shape = tuple(struct.unpack("<Q", fh.read(8))[0] for _ in range(ndim))
        header = {"version": version, "kind": kind, "shape": shape}
        if kind == KIND_FACTORS:
            axes = []
            for _ in range(ndim):
                lo, hi, n = struct.unpack("<ddQ", fh.read(24))
                axes.append((lo, hi, int(n)))
            n_x, r, n_v = struct.unpack("<QQQ", fh.read(24))
            header.update(axes=axes, n_x=int(n_x), rank=int(r), n_v=int(n_v))
        return header


def load_checkpoint(path):
    """Read a factors checkpoint; returns (state, x_axes, v_axes)."""
    header = read_header(path)
    if header["kind"] != KIND_FACTORS:
        raise ValueError(f"{path}: not a factors checkpoint")
    ndim = len(header["axes"])
    offset = 4 + 4 + 2 + 8 * ndim + 24 * ndim + 24
    n_x, r, n_v = header["n_x"], header["rank"], header["n_v"]
    with open(path, "rb") as fh:
        fh.seek(offset)
        X = np.frombuffer(fh.read(8 * n_x * r), dtype="<f8").reshape(n_x, r)
        S = np.frombuffer(fh.read(8 * r * r), dtype="<f8").reshape(r, r)
        V = np.frombuffer(fh.read(8 * n_v * r), dtype="<f8").reshape(n_v, r)
    X, S, V = X.copy(), S.copy(), V.copy()

    def _is_orthonormal(M):
        return np.abs(M.T @ M - np.eye(M.shape[1])).max() <= 1e-10

    # flag factors that are already orthonormal so resumed runs do not
    # re-orthonormalize (which would perturb the trajectory at roundoff level)
    state = LowRankState(
        X, S, V,
        x_orthonormal=_is_orthonormal(X),
        v_orthonormal=_is_orthonormal(V),
    )
    d_x = ndim // 2  # shipped experiments have d_x = d_v
    return state, header["axes"][:d_x], header["axes"][d_x:]


# ---------------------------------------------------------------------------
# run orchestration
# ---------------------------------------------------------------------------


def _fmt(x):
    return format(float(x), ".17g")


class DiagnosticsWriter:
    def __init__(self, path, d_v, record_timings=True):
        self.fh = open(path, "w")
        self.record_timings = record_timings
        cols = ["step", "time", "rank", "mass"]
        cols += [f"momentum_{i + 1}" for i in range(d_v)]
        cols += ["energy", "trunc_tail", "wall_ms"]
        self.fh.write(",".join(cols) + "\n")

    def write(self, report, momentum, energy):
        wall = report.wall_ms if self.record_timings else 0.0
        row = [str(report.step), _fmt(report.time), str(report.rank),
               _fmt(report.mass)]
        row += [_fmt(m) for m in momentum]
        row += [_fmt(energy), _fmt(report.trunc_tail), _fmt(wall)]
        self.fh.write(",".join(row) + "\n")

    def close(self):
        self.fh.close()


def _dense_momentum_energy(f, params):
    m = moments_dense(f, params, check=False)
    w = params.x_grid.weight
    momentum = w * (m.rho * m.u).sum(axis=1)
    energy = 0.5 * w * float(
        (m.rho * ((m.u**2).sum(axis=0) + params.d_v * m.T)).sum()
    )
    return momentum, energy


def run_experiment(cfg, resume=None):
    """Run a configured experiment; writes the diagnostics CSV, density
    snapshots and factor checkpoints into cfg.output.  Returns the final
    state and the list of StepReports."""
    x_grid, v_grid = build_grids(cfg)
    params = build_params(cfg, x_grid, v_grid)
    stepper = make_stepper(cfg, params)

    t0, start_step = 0.0, 0
    if resume is not None:
        state, _, _ = load_checkpoint(resume)
        start_step = _step_from_name(resume)
        t0 = start_step * cfg.dt
    else:
        state = initial_condition(cfg, x_grid, v_grid)
    if stepper.is_dense:
        state = evaluate(state) if isinstance(state, LowRankState) else state

    os.makedirs(cfg.output, exist_ok=True)
    writer = DiagnosticsWriter(
        os.path.join(cfg.output, "diagnostics.csv"),
        params.d_v,
        cfg.record_timings,
    )
    snap_stride = max(1, int(round(cfg.snapshot_every / cfg.dt)))
    ckpt_stride = max(1, int(round(cfg.checkpoint_every / cfg.dt)))

    def on_step(st, report):
        if stepper.is_dense:
            momentum, energy = _dense_momentum_energy(st, params)
        else:
            momentum, energy = diagnostics.momentum_energy(st, params)
        writer.write(report, momentum, energy)
        if report.step % snap_stride == 0:
            rho = (
                params.v_grid.weight * st.sum(axis=1)
                if stepper.is_dense
                else diagnostics.density(st, params)
            )
            snap = diagnostics.FieldSnapshot(
                "density", report.time, x_grid.shape, rho
            )
            save_field(
                os.path.join(cfg.output, f"density_{report.step:08d}.dlrk"),
                snap,
            )
        if not stepper.is_dense and report.step % ckpt_stride == 0:
            save_checkpoint(
                os.path.join(cfg.output, f"checkpoint_{report.step:08d}.dlrk"),
                st, x_grid, v_grid,
            )

    try:
        final, reports = integrators.run(
            stepper, state, cfg.t_final, cfg.dt, on_step=on_step,
            t0=t0, start_step=start_step,
        )
    finally:
        writer.close()
    return final, reports


def _step_from_name(path):
    stem = os.path.splitext(os.path.basename(path))[0]
    tail = stem.rsplit("_", 1)[-1]
    try:
        return int(tail)
    except ValueError:
        return 0


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="bgk-lowrank",
        description="Low-rank Boltzmann-BGK solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment")
    run_p.add_argument("--config", default=None)
    run_p.add_argument("--experiment", default=None, choices=EXPERIMENTS)
    run_p.add_argument("--integrator", default=None, choices=INTEGRATORS)
    run_p.add_argument("--rank", type=int, default=None)
    run_p.add_argument("--theta", type=float, default=None)
    run_p.add_argument("--rank-max", type=int, default=None)
    run_p.add_argument("--dt", type=float, default=None)
    run_p.add_argument("--t-final", type=float, default=None)
    run_p.add_argument("--epsilon", type=float, default=None)
    run_p.add_argument("--output", default=None)
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--resume", default=None)

    val_p = sub.add_parser("validate", help="parse and validate a config file")
    val_p.add_argument("--config", required=True)

    info_p = sub.add_parser("info", help="print a snapshot/checkpoint header")
    info_p.add_argument("checkpoint")
    return parser


def main(argv=None):
    """CLI entry; exit codes: 0 success, 1 config error, 2 numerical abort."""
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "info":
        try:
            header = read_header(args.checkpoint)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        kind = {KIND_FIELD: "field", KIND_FACTORS: "factors"}.get(
            header["kind"], "?"
        )
        print(f"kind: {kind}")
        print(f"version: {header['version']}")
        print(f"shape: {header['shape']}")
        if header["kind"] == KIND_FACTORS:
            print(f"rank: {header['rank']}")
            print(f"N_x: {header['n_x']}, N_v: {header['n_v']}")
            for i, (lo, hi, n) in enumerate(header["axes"]):
                print(f"axis {i}: [{lo}, {hi}) n={n}")
        return 0

    text = ""
    if args.config is not None:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            print(f"error: cannot read config {args.config}: {exc}",
                  file=sys.stderr)
            return 1

    if args.command == "validate":
        try:
            parse_config(text)
        except ConfigError as exc:
            for e in exc.errors:
                print(f"config error: {e}", file=sys.stderr)
            return 1
        print("ok")
        return 0

    overrides = {
        "experiment": args.experiment,
        "integrator": args.integrator,
        "rank": args.rank,
        "theta": args.theta,
        "rank_max": args.rank_max,
        "dt": args.dt,
        "t_final": args.t_final,
        "epsilon": args.epsilon,
        "output": args.output,
        "seed": args.seed,
    }
    try:
        cfg = parse_config(text, overrides=overrides)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return 1
    try:
        run_experiment(cfg, resume=args.resume)
    except integrators.StepAbortError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 2
    return 0


def cli():
    sys.exit(main())


if __name__ == "__main__":
    cli()
