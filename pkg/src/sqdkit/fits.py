"""Spectroscopic post-processing of potential energy curves.

Morse-well and power-law-tail least squares with analytic Jacobians,
harmonic frequency extraction, and dissociation energy with propagated
one-sigma uncertainties. Unit conversions use CODATA values; the
Hartree -> kJ/mol constant is pinned to 2625.4996.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import IO, Callable

import numpy as np
from scipy.optimize import least_squares

HARTREE_TO_KJ_PER_MOL = 2625.4996
HARTREE_TO_JOULE = 4.3597447222071e-18
AMU_TO_KG = 1.66053906660e-27
ANGSTROM_TO_M = 1e-10
SPEED_OF_LIGHT_CM_S = 2.99792458e10

DEFAULT_MORSE_WINDOW = (0.9, 1.5)
DEFAULT_POWER_EXPONENT = 6.0  # dispersion-like initializer
N2_REDUCED_MASS_AMU = 7.001537  # half the atomic mass of 14N

MAX_FIT_EVALUATIONS = 500


class FitError(RuntimeError):
    """Fit could not run or did not converge."""


@dataclass
class CurveData:
    """Energies on a shared strictly-increasing bondlength grid, per state."""

    r: np.ndarray  # Angstrom
    energies: dict[str, np.ndarray]  # Hartree, keyed by state label

    def __post_init__(self) -> None:
        self.r = np.asarray(self.r, dtype=float)
        if np.any(np.diff(self.r) <= 0):
            raise ValueError("bondlengths must be strictly increasing")
        self.energies = {k: np.asarray(v, dtype=float) for k, v in self.energies.items()}
        for label, e in self.energies.items():
            if e.shape != self.r.shape:
                raise ValueError(f"state {label!r} has {e.size} energies for {self.r.size} points")

    @classmethod
    def from_text(cls, source: str | IO) -> "CurveData":
        """Parse delimited text: columns R, E_state0, E_state1, ...

        A non-numeric first row is taken as the header naming the states;
        otherwise states are labeled state0, state1, ...
        """
        text = source if isinstance(source, str) else source.read()
        rows = []
        labels: list[str] | None = None
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.replace(",", " ").split()
            try:
                rows.append([float(f) for f in fields])
            except ValueError:
                if labels is None and not rows:
                    labels = fields[1:]
                else:
                    raise ValueError(f"non-numeric data row {line!r}") from None
        if not rows:
            raise ValueError("curve file holds no data rows")
        data = np.array(rows)
        if labels is None:
            labels = [f"state{i}" for i in range(data.shape[1] - 1)]
        if len(labels) != data.shape[1] - 1:
            raise ValueError(f"{len(labels)} labels for {data.shape[1] - 1} energy columns")
        return cls(data[:, 0], {lab: data[:, i + 1] for i, lab in enumerate(labels)})

    def state(self, label: str | None = None) -> np.ndarray:
        if label is None:
            label = next(iter(self.energies))
        return self.energies[label]


@dataclass
class MorseFit:
    """Morse-well parameters with one-sigma uncertainties."""

    e_min: float
    de_well: float  # Hartree, well depth
    a: float  # 1/Angstrom
    re: float  # Angstrom
    omega: float  # 1/cm
    sigma_e_min: float
    sigma_de_well: float
    sigma_a: float
    sigma_re: float
    sigma_omega: float
    residual_rms: float
    window: tuple[float, float]


@dataclass
class PowerLawFit:
    """Asymptote E(R) = E_inf - A R^-b with one-sigma uncertainties.

    ``amplitude`` is signed: positive when the curve approaches the
    asymptote from below (bound tails), negative when from above. The
    magnitude and the exponent are optimized in log space, so |A| and b
    stay positive by construction.
    """

    e_inf: float
    amplitude: float
    exponent: float
    sigma_e_inf: float
    sigma_amplitude: float
    sigma_exponent: float
    residual_rms: float
    n_points: int


@dataclass
class FitReport:
    """Everything the spectroscopic table needs for one electronic state."""

    morse: MorseFit
    tail: PowerLawFit
    d0_kj_per_mol: float
    sigma_d0_kj_per_mol: float


def morse_energy(r: np.ndarray, e_min: float, de: float, a: float, re: float) -> np.ndarray:
    return e_min + de * (1.0 - np.exp(-a * (r - re))) ** 2


def morse_jacobian(r: np.ndarray, e_min: float, de: float, a: float, re: float) -> np.ndarray:
    u = np.exp(-a * (r - re))
    one_minus = 1.0 - u
    jac = np.empty((r.size, 4))
    jac[:, 0] = 1.0
    jac[:, 1] = one_minus**2
    jac[:, 2] = 2.0 * de * one_minus * u * (r - re)
    jac[:, 3] = -2.0 * de * a * u * one_minus
    return jac


def harmonic_frequency_cm(a: float, de: float, mu_amu: float) -> float:
    """omega = (a / 2 pi c) sqrt(2 De / mu) converted to wavenumbers."""
    a_si = a / ANGSTROM_TO_M
    de_si = de * HARTREE_TO_JOULE
    mu_si = mu_amu * AMU_TO_KG
    nu_hz = a_si / (2.0 * np.pi) * np.sqrt(2.0 * de_si / mu_si)
    return nu_hz / SPEED_OF_LIGHT_CM_S


def _window_points(
    r: np.ndarray, e: np.ndarray, window: tuple[float, float] | Callable[[np.ndarray], np.ndarray]
) -> tuple[np.ndarray, np.ndarray]:
    if callable(window):
        mask = np.asarray(window(r), dtype=bool)
    else:
        lo, hi = window
        mask = (r >= lo) & (r <= hi)
    return r[mask], e[mask]


def _covariance(jac: np.ndarray, residuals: np.ndarray) -> np.ndarray:
    n, p = jac.shape
    dof = max(n - p, 1)
    s2 = float(residuals @ residuals) / dof
    # pinv: a degenerate direction (e.g. amplitude driven to zero) must not
    # kill the fit report, only inflate nothing along the dead direction
    return s2 * np.linalg.pinv(jac.T @ jac)


def fit_morse(
    curve: CurveData,
    window: tuple[float, float] = DEFAULT_MORSE_WINDOW,
    mu_amu: float = N2_REDUCED_MASS_AMU,
    state: str | None = None,
) -> MorseFit:
    """Levenberg-Marquardt Morse fit over a bondlength window.

    The initial guess takes the discrete minimum and the local quadratic
    curvature; the harmonic frequency and its uncertainty come from the
    fitted (a, De) with full covariance propagation.
    """
    if mu_amu <= 0:
        raise FitError(f"reduced mass must be positive, got {mu_amu}")
    r, e = _window_points(curve.r, curve.state(state), window)
    if r.size < 4:
        raise FitError(f"Morse window {window} holds {r.size} points, need at least 4")

    i_min = int(np.argmin(e))
    e_min0 = float(e[i_min])
    re0 = float(r[i_min])
    de0 = max(float(e[-1] - e_min0), 1e-3)
    if 0 < i_min < r.size - 1:
        h1, h2 = r[i_min] - r[i_min - 1], r[i_min + 1] - r[i_min]
        curvature = 2.0 * (
            h1 * e[i_min + 1] + h2 * e[i_min - 1] - (h1 + h2) * e[i_min]
        ) / (h1 * h2 * (h1 + h2))
        a0 = float(np.sqrt(max(curvature, 1e-6) / (2.0 * de0)))
    else:
        a0 = 2.0

    def residual(theta: np.ndarray) -> np.ndarray:
        return morse_energy(r, *theta) - e

    def jac(theta: np.ndarray) -> np.ndarray:
        return morse_jacobian(r, *theta)

    solution = least_squares(
        residual,
        np.array([e_min0, de0, a0, re0]),
        jac=jac,
        method="lm",
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=MAX_FIT_EVALUATIONS,
    )
    if not solution.success:
        raise FitError(f"Morse fit did not converge: {solution.message}")
    e_min, de, a, re = (float(v) for v in solution.x)
    if a <= 0:
        raise FitError(f"Morse fit produced a nonpositive width parameter a = {a}")
    if de <= 0:
        raise FitError(f"Morse fit produced a nonpositive well depth De = {de}")
    res = residual(solution.x)
    cov = _covariance(jac(solution.x), res)
    sigmas = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    omega = harmonic_frequency_cm(a, de, mu_amu)
    grad = np.array([0.0, omega / (2.0 * de), omega / a, 0.0])
    sigma_omega = float(np.sqrt(max(grad @ cov @ grad, 0.0)))
    return MorseFit(
        e_min=e_min,
        de_well=de,
        a=a,
        re=re,
        omega=omega,
        sigma_e_min=float(sigmas[0]),
        sigma_de_well=float(sigmas[1]),
        sigma_a=float(sigmas[2]),
        sigma_re=float(sigmas[3]),
        sigma_omega=sigma_omega,
        residual_rms=float(np.sqrt(np.mean(res**2))),
        window=(float(window[0]), float(window[1])) if not callable(window) else (np.nan, np.nan),
    )


def fit_powerlaw(
    curve: CurveData,
    window: tuple[float, float] | Callable[[np.ndarray], np.ndarray],
    state: str | None = None,
    exponent_guess: float = DEFAULT_POWER_EXPONENT,
) -> PowerLawFit:
    """Least squares of E(R) = E_inf - A R^-b with |A|, b > 0 by construction.

    Magnitude and exponent are optimized in log space and the amplitude sign
    comes from the tail's approach direction; the quoted uncertainties are
    mapped back with the delta method.
    """
    r, e = _window_points(curve.r, curve.state(state), window)
    if r.size < 4:
        raise FitError(f"power-law window holds {r.size} points, need at least 4")
    diffs = np.diff(e)
    if np.any(diffs > 0) and np.any(diffs < 0):
        warnings.warn("power-law window is not monotone toward the asymptote")
    # approach direction: bound tails rise toward E_inf (A > 0); a curve
    # decaying from above carries the opposite amplitude sign
    sign = -1.0 if e[-1] < e[0] else 1.0

    e_inf0 = float(e[-1] + (e[-1] - e[0]) * 0.05)
    amp0 = max(abs(e_inf0 - e[0]) * r[0] ** exponent_guess, 1e-10)
    theta0 = np.array([e_inf0, np.log(amp0), np.log(exponent_guess)])

    def residual(theta: np.ndarray) -> np.ndarray:
        e_inf, log_a, log_b = theta
        return (e_inf - sign * np.exp(log_a) * r ** (-np.exp(log_b))) - e

    def jac(theta: np.ndarray) -> np.ndarray:
        _, log_a, log_b = theta
        amp, b = np.exp(log_a), np.exp(log_b)
        tail = sign * amp * r ** (-b)
        out = np.empty((r.size, 3))
        out[:, 0] = 1.0
        out[:, 1] = -tail
        out[:, 2] = tail * b * np.log(r)
        return out

    solution = least_squares(
        residual,
        theta0,
        jac=jac,
        method="lm",
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=MAX_FIT_EVALUATIONS,
    )
    if not solution.success:
        raise FitError(f"power-law fit did not converge: {solution.message}")
    e_inf, log_a, log_b = (float(v) for v in solution.x)
    amp, b = float(np.exp(log_a)), float(np.exp(log_b))
    res = residual(solution.x)
    cov = _covariance(jac(solution.x), res)
    sigmas = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return PowerLawFit(
        e_inf=e_inf,
        amplitude=sign * amp,
        exponent=b,
        sigma_e_inf=float(sigmas[0]),
        sigma_amplitude=amp * float(sigmas[1]),
        sigma_exponent=b * float(sigmas[2]),
        residual_rms=float(np.sqrt(np.mean(res**2))),
        n_points=int(r.size),
    )


def dissociation_energy(morse: MorseFit, tail: PowerLawFit) -> tuple[float, float]:
    """D0 = (E_inf - E_min) in kJ/mol with quadrature-propagated sigma."""
    d0 = (tail.e_inf - morse.e_min) * HARTREE_TO_KJ_PER_MOL
    sigma = HARTREE_TO_KJ_PER_MOL * float(
        np.hypot(tail.sigma_e_inf, morse.sigma_e_min)
    )
    return float(d0), sigma


def fit_report(
    curve: CurveData,
    morse_window: tuple[float, float] = DEFAULT_MORSE_WINDOW,
    power_window: tuple[float, float] | Callable[[np.ndarray], np.ndarray] = (2.0, np.inf),
    mu_amu: float = N2_REDUCED_MASS_AMU,
    state: str | None = None,
) -> FitReport:
    """Morse + tail fits and the dissociation energy for one state."""
    morse = fit_morse(curve, morse_window, mu_amu, state)
    tail = fit_powerlaw(curve, power_window, state)
    d0, sigma_d0 = dissociation_energy(morse, tail)
    return FitReport(morse=morse, tail=tail, d0_kj_per_mol=d0, sigma_d0_kj_per_mol=sigma_d0)
