"""Input-output reduced-order models identified from full-order trajectories.

Two transparent model families, both discrete-time lag models on
deviation variables around a quiescent operating point:

* LtiRom  - linear autoregressive-with-input model, ordinary least
  squares, no bias term, so superposition holds exactly.
* QuadRom - the same lag vector extended with a bias and all pairwise
  products, ridge-regularized; per-feature training-range clamps keep
  extrapolated rollouts finite.

Lag windows warm-start from the quiescent point: outputs before t=0
equal y(0), inputs before t=0 equal the input reference.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import RomDivergenceError, RomTrainingError
from .signals import ExcitationSignal


@dataclass(frozen=True)
class Trajectory:
    """One uniformly sampled input/output record."""

    y: np.ndarray               # (n,) outputs
    u: np.ndarray               # (n_channels, n) inputs

    def __post_init__(self):
        u = np.atleast_2d(np.asarray(self.u, float))
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "y", np.asarray(self.y, float))
        if self.u.shape[1] != self.y.shape[0]:
            raise ValueError("input and output lengths differ")
        if not (np.all(np.isfinite(self.y)) and np.all(np.isfinite(self.u))):
            raise ValueError("trajectory contains non-finite samples")


@dataclass(frozen=True)
class TrainingSet:
    """Trajectories sharing one sample step and operating point."""

    trajectories: tuple
    dt: float
    y_ref: float
    u_ref: np.ndarray           # per channel

    def __post_init__(self):
        object.__setattr__(self, "trajectories", tuple(self.trajectories))
        object.__setattr__(self, "u_ref",
                           np.atleast_1d(np.asarray(self.u_ref, float)))
        if not self.trajectories:
            raise ValueError("training set is empty")
        n_ch = self.trajectories[0].u.shape[0]
        if any(tr.u.shape[0] != n_ch for tr in self.trajectories):
            raise ValueError("trajectories disagree on channel count")
        if self.u_ref.shape[0] != n_ch:
            raise ValueError("u_ref length does not match channel count")

    @property
    def n_channels(self):
        return self.trajectories[0].u.shape[0]


def _norm_orders(orders, n_channels):
    na, nb = orders
    nb = (nb,) * n_channels if np.isscalar(nb) else tuple(nb)
    if len(nb) != n_channels:
        raise ValueError("need one input lag order per channel")
    if na < 1 or any(m < 1 for m in nb):
        raise ValueError("lag orders must be >= 1")
    return int(na), tuple(int(m) for m in nb)


def _product_pairs(n_base):
    pairs = [(i, j) for i in range(n_base) for j in range(i, n_base)]
    pi = np.array([p[0] for p in pairs], dtype=np.int64)
    pj = np.array([p[1] for p in pairs], dtype=np.int64)
    return pi, pj


def _base_matrix(y_dev, u_dev, na, nb):
    """Lag matrix with warm-started histories; one row per predicted step.

    Row k predicts y_dev[k] from y lags (pre-filled with y_dev[0]) and u
    lags (pre-filled with zero, the quiescent input).
    """
    n = y_dev.shape[0]
    cols = []
    for lag in range(1, na + 1):
        col = np.full(n - 1, y_dev[0])          # pre-fill: y before t=0 is y0
        col[lag - 1:] = y_dev[:n - lag]
        cols.append(col)
    for c in range(u_dev.shape[0]):
        for lag in range(1, nb[c] + 1):
            col = np.zeros(n - 1)               # pre-fill: u before t=0 is u_ref
            col[lag - 1:] = u_dev[c, :n - lag]
            cols.append(col)
    return np.column_stack(cols), y_dev[1:]


def _feature_matrix(base, has_bias, pi, pj):
    parts = []
    if has_bias:
        parts.append(np.ones((base.shape[0], 1)))
    parts.append(base)
    if pi.size:
        parts.append(base[:, pi] * base[:, pj])
    return np.hstack(parts)


@dataclass(frozen=True)
class _LagModel:
    """Shared evaluation machinery of both ROM variants."""

    na: int
    nb: tuple
    dt: float
    y_ref: float
    u_ref: np.ndarray
    coef: np.ndarray
    clamp_lo: np.ndarray
    clamp_hi: np.ndarray
    has_bias: bool
    prod_i: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    prod_j: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    # integrating form: coef predicts the output INCREMENT, so evaluation
    # adds one to the first output-lag coefficient (pole-at-one prior for
    # slow thermal dynamics)
    integrating: bool = False
    training_report: dict = field(default_factory=dict, compare=False)

    @property
    def n_channels(self):
        return len(self.nb)

    @property
    def n_features(self):
        return int(self.has_bias) + self.na + sum(self.nb) + self.prod_i.size

    def _nb_arr(self):
        return np.array(self.nb, dtype=np.int64)

    def eval_coef(self):
        cached = self.__dict__.get("_eval_coef")
        if cached is None:
            cached = self.coef.copy()
            if self.integrating:
                cached[int(self.has_bias)] += 1.0
            object.__setattr__(self, "_eval_coef", cached)
        return cached

    def simulate(self, u, y0=None):
        """Rollout over a raw input sequence; returns raw outputs.

        u has shape (n_channels, n) or (n,) for single-input models.
        """
        u = np.atleast_2d(np.asarray(u, float))
        if u.shape[0] != self.n_channels:
            raise ValueError(f"expected {self.n_channels} input channels")
        y0 = self.y_ref if y0 is None else float(y0)
        u_dev = np.ascontiguousarray(u - self.u_ref[:, None])
        y_dev, n_ok = kernels.narx_rollout(
            y0 - self.y_ref, u_dev, self.na, self._nb_arr(), self.has_bias,
            self.eval_coef(), self.clamp_lo, self.clamp_hi,
            self.prod_i, self.prod_j)
        if n_ok < u.shape[1]:
            raise RomDivergenceError(
                f"rollout diverged at step {n_ok} (t={n_ok * self.dt:.1f}s)",
                time=n_ok * self.dt)
        return y_dev + self.y_ref

    def initial_state(self, y0=None):
        y0 = self.y_ref if y0 is None else float(y0)
        return RomState(
            hist_y=np.full(self.na, y0 - self.y_ref),
            hist_u=np.zeros((self.n_channels, max(self.nb))))


@dataclass
class RomState:
    """Mutable lag windows of one rollout; single-thread confined."""

    hist_y: np.ndarray
    hist_u: np.ndarray


def rom_step(rom, state: RomState, u):
    """Advance the model one sample step with raw input u (per channel)."""
    u_dev = np.atleast_1d(np.asarray(u, float)) - rom.u_ref
    y_dev = kernels.narx_step(
        state.hist_y, state.hist_u, u_dev, rom.na, rom._nb_arr(),
        rom.has_bias, rom.eval_coef(), rom.clamp_lo, rom.clamp_hi,
        rom.prod_i, rom.prod_j)
    if not math.isfinite(y_dev):
        raise RomDivergenceError("rom step produced a non-finite output")
    return y_dev + rom.y_ref


@dataclass(frozen=True)
class LtiRom(_LagModel):
    variant = "lti"


@dataclass(frozen=True)
class QuadRom(_LagModel):
    variant = "quad"
    ridge: float = 0.0


def _rollout_errors(model, data: TrainingSet):
    errors = {}
    for idx, tr in enumerate(data.trajectories):
        y_hat = model.simulate(tr.u, y0=tr.y[0])
        errors[idx] = float(np.max(np.abs(y_hat - tr.y)))
    return errors


def train_lti(data: TrainingSet, orders=(4, 4)) -> LtiRom:
    """Least-squares linear lag model on deviation variables.

    Raises RomTrainingError for degenerate (unexcited) regressions. The
    training report carries the per-trajectory rollout error and the
    relative error max|err| / range(y).
    """
    na, nb = _norm_orders(orders, data.n_channels)
    blocks, targets = [], []
    for tr in data.trajectories:
        base, target = _base_matrix(tr.y - data.y_ref,
                                    tr.u - data.u_ref[:, None], na, nb)
        blocks.append(base)
        targets.append(target)
    phi = np.vstack(blocks)
    y = np.concatenate(targets)
    if phi.shape[0] < phi.shape[1]:
        raise RomTrainingError(
            f"{phi.shape[0]} samples cannot determine {phi.shape[1]} "
            "coefficients")
    scale = np.abs(phi).max(axis=0)
    if np.any(scale == 0.0) or np.linalg.matrix_rank(phi) < phi.shape[1]:
        cond = np.linalg.cond(phi)
        raise RomTrainingError(
            "rank-deficient regression, input/output not exciting enough "
            f"(condition number {cond:.3e})")
    coef, *_ = np.linalg.lstsq(phi, y, rcond=None)
    n_feat = na + sum(nb)
    rom = LtiRom(na=na, nb=nb, dt=data.dt, y_ref=data.y_ref,
                 u_ref=data.u_ref, coef=coef,
                 clamp_lo=np.full(n_feat, -np.inf),
                 clamp_hi=np.full(n_feat, np.inf),
                 has_bias=False)
    errors = _rollout_errors(rom, data)
    y_all = np.concatenate([tr.y for tr in data.trajectories])
    rel = max(errors.values()) / max(np.ptp(y_all), 1e-300)
    rom.training_report.update(
        e_max=errors, relative_error=rel,
        one_step_rss=float(np.sum((phi @ coef - y) ** 2)))
    return rom


_RIDGE_GRID = (0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2)


def _fit_quadratic(phi, y, ridge, has_bias):
    """Ridge solve on column-standardized features (bias unpenalized)."""
    mu = phi.mean(axis=0)
    sd = phi.std(axis=0)
    keep = sd > 0.0
    if has_bias:
        mu[0], sd[0] = 0.0, 1.0
        keep[0] = True
    sd_safe = np.where(keep, sd, 1.0)
    z = (phi - mu) / sd_safe
    z[:, ~keep] = 0.0
    n_cols = phi.shape[1]
    if ridge > 0.0:
        pen = np.sqrt(ridge) * np.eye(n_cols)
        if has_bias:
            pen[0, 0] = 0.0
        A = np.vstack([z, pen])
        rhs = np.concatenate([y, np.zeros(n_cols)])
    else:
        A, rhs = z, y
    theta_z, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    theta = np.where(keep, theta_z / sd_safe, 0.0)
    if has_bias:
        theta[0] = theta_z[0] - float(np.sum(theta[1:] * mu[1:]))
    return theta


def train_quadratic(data: TrainingSet, orders=(4, 4), ridge=None) -> QuadRom:
    """Ridge-regularized quadratic lag model.

    With ridge=None the parameter is picked by holding out the last
    trajectory, scanning a small grid for the lowest rollout error, then
    refitting on everything.
    """
    na, nb = _norm_orders(orders, data.n_channels)
    pi, pj = _product_pairs(na + sum(nb))

    def build(trajectories):
        blocks, targets = [], []
        for tr in trajectories:
            base, target = _base_matrix(tr.y - data.y_ref,
                                        tr.u - data.u_ref[:, None], na, nb)
            blocks.append(_feature_matrix(base, True, pi, pj))
            # integrating form: regress the increment over the newest
            # output lag (base column 0)
            targets.append(target - base[:, 0])
        return np.vstack(blocks), np.concatenate(targets)

    def assemble(coef, phi, ridge_used):
        lo = phi.min(axis=0).copy()
        hi = phi.max(axis=0).copy()
        lo[0], hi[0] = -np.inf, np.inf    # bias column never clamps
        return QuadRom(na=na, nb=nb, dt=data.dt, y_ref=data.y_ref,
                       u_ref=data.u_ref, coef=coef, clamp_lo=lo,
                       clamp_hi=hi, has_bias=True, prod_i=pi, prod_j=pj,
                       integrating=True, ridge=ridge_used)

    phi_all, y_all = build(data.trajectories)
    if not np.all(np.isfinite(phi_all)):
        raise RomTrainingError("non-finite features in the training data")
    if ridge is None and len(data.trajectories) >= 2:
        held = data.trajectories[-1]
        phi_fit, y_fit = build(data.trajectories[:-1])
        if phi_fit.shape[0] < phi_fit.shape[1]:
            phi_fit, y_fit = phi_all, y_all
        best = (np.inf, _RIDGE_GRID[1])
        for lam in _RIDGE_GRID:
            if lam == 0.0 and phi_fit.shape[0] <= phi_fit.shape[1]:
                continue
            cand = assemble(_fit_quadratic(phi_fit, y_fit, lam, True),
                            phi_all, lam)
            try:
                e = float(np.max(np.abs(cand.simulate(held.u, y0=held.y[0])
                                        - held.y)))
            except RomDivergenceError:
                continue
            if e < best[0]:
                best = (e, lam)
        ridge = best[1]
    elif ridge is None:
        ridge = 1e-8
    if ridge == 0.0 and phi_all.shape[0] <= phi_all.shape[1]:
        raise RomTrainingError(
            f"{phi_all.shape[0]} samples for {phi_all.shape[1]} features "
            "needs a positive ridge parameter")

    coef = _fit_quadratic(phi_all, y_all, ridge, True)
    rom = assemble(coef, phi_all, ridge)
    errors = _rollout_errors(rom, data)
    rom.training_report.update(
        e_max=errors,
        one_step_rss=float(np.sum((phi_all @ coef - y_all) ** 2)))
    return rom


def evaluate_rom(rom, signal: ExcitationSignal, duration, y0=None,
                 extra_channels=None):
    """Closed rollout driven by a signal; returns (t, u, y) arrays.

    extra_channels maps channel index -> callable(t)->value for models
    with more inputs than the primary drive signal.
    """
    t, u1 = signal.sample(rom.dt, duration)
    u = np.tile(rom.u_ref[:, None], (1, t.size)).astype(float)
    u[0] = u1
    if extra_channels:
        for c, fn in extra_channels.items():
            u[c] = np.array([fn(tk) for tk in t])
    y = rom.simulate(u, y0=y0)
    return t, u, y


@dataclass(frozen=True)
class RomErrorReport:
    e_max: float
    e_rms: float
    breakdown: dict = field(default_factory=dict)

    def pretty(self):
        lines = [f"E_max = {self.e_max:.4f}", f"E_rms = {self.e_rms:.4f}"]
        for name, (emax, erms) in self.breakdown.items():
            lines.append(f"  {name}: E_max={emax:.4f} E_rms={erms:.4f}")
        return "\n".join(lines) + "\n"


def rom_error(t_rom, y_rom, t_fom, y_fom, name="trajectory") -> RomErrorReport:
    """Error metrics on the common time grid.

    The denser series is linearly interpolated onto the sparser one,
    restricted to the overlapping window.
    """
    t_rom = np.asarray(t_rom, float)
    t_fom = np.asarray(t_fom, float)
    lo = max(t_rom.min(), t_fom.min())
    hi = min(t_rom.max(), t_fom.max())
    if hi < lo:
        raise ValueError("time ranges do not overlap")
    if t_rom.size >= t_fom.size:
        dense_t, dense_y, coarse_t, coarse_y = t_rom, y_rom, t_fom, y_fom
    else:
        dense_t, dense_y, coarse_t, coarse_y = t_fom, y_fom, t_rom, y_rom
    sel = (coarse_t >= lo) & (coarse_t <= hi)
    diff = np.interp(coarse_t[sel], dense_t, dense_y) - np.asarray(
        coarse_y, float)[sel]
    e_max = float(np.max(np.abs(diff)))
    e_rms = float(np.sqrt(np.mean(diff**2)))
    return RomErrorReport(e_max, e_rms, {name: (e_max, e_rms)})


def combine_error_reports(reports) -> RomErrorReport:
    breakdown = {}
    for r in reports:
        breakdown.update(r.breakdown)
    e_max = max(r.e_max for r in reports)
    e_rms = max(r.e_rms for r in reports)
    return RomErrorReport(e_max, e_rms, breakdown)


# Plain-text persistence: header "CTROM v1 <variant>", then key/value
# lines; floats as shortest round-trip decimals so reloads are exact.

def _fmt(values):
    return " ".join(repr(float(v)) for v in np.atleast_1d(values))


def save_rom(rom, path):
    variant = rom.variant
    lines = [f"CTROM v1 {variant}",
             f"dt {float(rom.dt)!r}",
             f"na {rom.na}",
             f"nb {' '.join(str(int(m)) for m in rom.nb)}",
             f"y_ref {float(rom.y_ref)!r}",
             f"u_ref {_fmt(rom.u_ref)}",
             f"bias {int(rom.has_bias)}",
             f"integrating {int(rom.integrating)}",
             f"coef {_fmt(rom.coef)}",
             f"clamp_lo {_fmt(rom.clamp_lo)}",
             f"clamp_hi {_fmt(rom.clamp_hi)}"]
    if variant == "quad":
        lines.append(f"ridge {float(rom.ridge)!r}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_rom(path):
    with open(path, encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    head = lines[0].split()
    if len(head) != 3 or head[0] != "CTROM" or head[1] != "v1":
        raise ValueError(f"not a CTROM v1 file: {lines[0]!r}")
    variant = head[2]
    fields = {}
    for ln in lines[1:]:
        key, _, rest = ln.partition(" ")
        fields[key] = rest
    na = int(fields["na"])
    nb = tuple(int(v) for v in fields["nb"].split())
    coef = np.array([float(v) for v in fields["coef"].split()])
    lo = np.array([float(v) for v in fields["clamp_lo"].split()])
    hi = np.array([float(v) for v in fields["clamp_hi"].split()])
    u_ref = np.array([float(v) for v in fields["u_ref"].split()])
    common = dict(na=na, nb=nb, dt=float(fields["dt"]),
                  y_ref=float(fields["y_ref"]), u_ref=u_ref, coef=coef,
                  clamp_lo=lo, clamp_hi=hi, has_bias=bool(int(fields["bias"])),
                  integrating=bool(int(fields.get("integrating", "0"))))
    if variant == "lti":
        return LtiRom(**common)
    if variant == "quad":
        pi, pj = _product_pairs(na + sum(nb))
        return QuadRom(**common, prod_i=pi, prod_j=pj,
                       ridge=float(fields.get("ridge", 0.0)))
    raise ValueError(f"unknown CTROM variant {variant!r}")


def training_set_from_records(records, dt_rom, y_ref, u_ref,
                              convection_channel=False) -> TrainingSet:
    """Build a TrainingSet from (t, u, y[, conv]) record tuples.

    Each record is (t, T_in, T_core) or (t, T_in, T_core, conv_mult);
    columns are resampled onto the uniform dt_rom grid.
    """
    trajectories = []
    n_ch = 2 if convection_channel else 1
    for rec in records:
        t = np.asarray(rec[0], float)
        grid = np.arange(0.0, t[-1] + 1e-9, dt_rom)
        u1 = np.interp(grid, t, np.asarray(rec[1], float))
        y = np.interp(grid, t, np.asarray(rec[2], float))
        if convection_channel:
            conv = (np.interp(grid, t, np.asarray(rec[3], float))
                    if len(rec) > 3 and rec[3] is not None
                    else np.ones_like(grid))
            u = np.vstack([u1, conv])
        else:
            u = u1[None, :]
        trajectories.append(Trajectory(y=y, u=u))
    u_ref = np.atleast_1d(np.asarray(u_ref, float))
    if convection_channel and u_ref.size == 1:
        u_ref = np.array([u_ref[0], 1.0])
    return TrainingSet(trajectories=tuple(trajectories), dt=dt_rom,
                       y_ref=y_ref, u_ref=u_ref[:n_ch])
