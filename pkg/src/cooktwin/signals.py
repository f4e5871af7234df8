"""Parametric excitation signals driving the input temperature.

Immutable value objects; evaluation is total for t >= 0 and vectorizes
over numpy arrays. Values never leave the [baseline, peak] band (or
[peak, baseline] for negative excursions).
"""

from dataclasses import dataclass

import numpy as np

VARIANTS = (
    "constant_with_ramp",
    "trapezoid_pulse",
    "sawtooth",
    "half_sine_pulse",
    "rectangular_pulse",
    "pulse_train",
)

# variants whose primary duration parameter must be positive
_NEEDS_POSITIVE = {
    "sawtooth": "t_period",
    "half_sine_pulse": "t_pulse",
    "rectangular_pulse": "t_pulse",
    "pulse_train": "t_pulse",
}


@dataclass(frozen=True)
class ExcitationSignal:
    variant: str
    baseline: float             # K, value outside active windows
    peak: float                 # K, excursion target
    t_up: float = 0.0           # s, ramp-up time
    t_const: float = 0.0        # s, hold time (trapezoid)
    t_down: float = 0.0         # s, ramp-down time (trapezoid)
    t_period: float = 0.0       # s, sawtooth period
    t_pulse: float = 0.0        # s, pulse width
    t_dead: float = 0.0         # s, gap between train pulses
    n_pulses: int = 1

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown signal variant {self.variant!r}")
        for name in ("t_up", "t_const", "t_down", "t_period", "t_pulse", "t_dead"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if self.n_pulses < 1:
            raise ValueError("n_pulses must be >= 1")
        needed = _NEEDS_POSITIVE.get(self.variant)
        if needed and getattr(self, needed) <= 0.0:
            raise ValueError(f"{self.variant} requires {needed} > 0")

    def evaluate(self, t):
        """Signal value at time t (scalar or array), piecewise analytic."""
        t = np.asarray(t, float)
        frac = getattr(self, "_frac_" + self.variant)(t)
        out = self.baseline + (self.peak - self.baseline) * frac
        return float(out) if out.ndim == 0 else out

    def sample(self, dt, duration):
        """Values at t = 0, dt, ..., duration. Deterministic."""
        if dt <= 0.0:
            raise ValueError("sample step must be positive")
        n = int(np.floor(duration / dt + 1e-9)) + 1
        t = np.arange(n) * dt
        return t, self.evaluate(t)

    # fraction of the excursion, always in [0, 1] -------------------------

    def _frac_constant_with_ramp(self, t):
        if self.t_up == 0.0:
            return np.ones_like(t)
        return np.clip(t / self.t_up, 0.0, 1.0)

    def _frac_trapezoid_pulse(self, t):
        up_end = self.t_up
        hold_end = up_end + self.t_const
        down_end = hold_end + self.t_down
        frac = np.zeros_like(t)
        if self.t_up > 0.0:
            frac = np.where(t < up_end, t / self.t_up, frac)
        rampdown = 1.0 - (t - hold_end) / self.t_down if self.t_down > 0.0 else 0.0
        frac = np.where((t >= up_end) & (t < hold_end), 1.0, frac)
        frac = np.where((t >= hold_end) & (t < down_end), rampdown, frac)
        frac = np.where(t >= down_end, 0.0, frac)
        return np.clip(frac, 0.0, 1.0)

    def _frac_sawtooth(self, t):
        return np.mod(t, self.t_period) / self.t_period

    def _frac_half_sine_pulse(self, t):
        inside = (t >= 0.0) & (t <= self.t_pulse)
        return np.where(inside, np.sin(np.pi * np.clip(t, 0.0, self.t_pulse)
                                       / self.t_pulse), 0.0)

    def _frac_rectangular_pulse(self, t):
        return np.where((t >= 0.0) & (t < self.t_pulse), 1.0, 0.0)

    def _frac_pulse_train(self, t):
        cycle = self.t_pulse + self.t_dead
        k = np.floor_divide(t, cycle) if cycle > 0.0 else np.zeros_like(t)
        local = t - k * cycle
        active = (k < self.n_pulses) & (local < self.t_pulse)
        return np.where(active,
                        np.sin(np.pi * np.clip(local, 0.0, self.t_pulse)
                               / self.t_pulse), 0.0)


def constant_drive(value):
    """A flat signal, handy for constant boundary temperatures."""
    return ExcitationSignal("constant_with_ramp", baseline=value, peak=value)
