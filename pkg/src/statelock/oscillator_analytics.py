"""Closed forms and truncated-Fock numerics for the recapture analysis.

After the locked packet is brought back, the conversion efficiency to the
resting ground packet is governed by overlaps of coherent states, simple
phase rotations, and the two-photon (squeeze) part of the frequency-ramped
trap propagator.  This module provides those closed forms together with
matrix realizations in a truncated number basis, used throughout as the
independent numerical cross-check.

Conventions: hbar = 1; a coherent state |alpha> has mean quantum number
|alpha|^2; the squeeze operator is S(z) = exp[(z a^2 - z* a^+2)/2] with
z = r e^{i phi}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm


class TruncationError(ValueError):
    """Number-basis cutoff too small for the requested accuracy."""

    def __init__(self, msg: str, required_n_max: int):
        super().__init__(msg)
        self.required_n_max = required_n_max


@dataclass(frozen=True)
class CoherentLabel:
    """Complex label of a coherent state; |alpha|^2 is the mean quanta."""

    alpha: complex

    @property
    def mean_n(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def phase(self) -> float:
        return cmath.phase(self.alpha)


@dataclass
class FockVector:
    """Truncated number-basis amplitudes with an admissible tail budget."""

    amps: np.ndarray
    tail_tol: float = 1e-10

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        norm = np.linalg.norm(self.amps)
        if not (1.0 - self.tail_tol <= norm <= 1.0 + 1e-12):
            raise ValueError(
                f"norm {norm} outside [1 - {self.tail_tol}, 1]; "
                "raise N_max or loosen tail_tol"
            )

    @property
    def n_max(self) -> int:
        return len(self.amps) - 1

    def overlap(self, other: "FockVector") -> complex:
        n = min(len(self.amps), len(other.amps))
        return complex(np.vdot(self.amps[:n], other.amps[:n]))


@dataclass(frozen=True)
class SqueezeParams:
    """Factored propagator parameters: a number rotation by phi_rot acting
    first, followed by the squeeze S(r e^{i phi_sq})."""

    r: float
    phi_sq: float
    phi_rot: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("squeeze magnitude r must be >= 0")

    @property
    def z(self) -> complex:
        return self.r * cmath.exp(1j * self.phi_sq)


def poisson_cutoff(mean_n: float, tail_tol: float) -> int:
    """Smallest N with Poisson(mean_n) mass above N below tail_tol."""
    if mean_n == 0:
        return 0
    term = math.exp(-mean_n)
    cdf = term
    n = 0
    while 1.0 - cdf > tail_tol:
        n += 1
        term *= mean_n / n
        cdf += term
        if n > 100000:
            raise ValueError("cutoff search did not converge")
    return n


def fock_cutoff(mean_n: float, tail_tol: float = 1e-10, squeezing: bool = False) -> int:
    """Cutoff sizing rule: Poisson tail bound; doubled plus a small fixed
    headroom when squeezing will populate higher number states (the plain
    doubling leaves under a digit of margin as the squeeze approaches
    r = 1)."""
    n = poisson_cutoff(mean_n, tail_tol)
    return 2 * n + 8 if squeezing else n


def coherent_fock(alpha: complex, n_max: int, tail_tol: float = 1e-10) -> FockVector:
    """Coherent-state amplitudes e^{-|a|^2/2} a^k / sqrt(k!) up to n_max.

    Raises :class:`TruncationError` (reporting the needed cutoff) when the
    probability mass beyond n_max exceeds tail_tol.
    """
    alpha = complex(alpha)
    mean_n = abs(alpha) ** 2
    amps = np.empty(n_max + 1, dtype=complex)
    amps[0] = math.exp(-mean_n / 2.0)
    for k in range(1, n_max + 1):
        amps[k] = amps[k - 1] * alpha / math.sqrt(k)
    tail = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    if tail > tail_tol:
        raise TruncationError(
            f"tail mass {tail:.3e} above n_max={n_max} exceeds {tail_tol:.1e}",
            required_n_max=poisson_cutoff(mean_n, tail_tol),
        )
    return FockVector(amps=amps, tail_tol=tail_tol)


def coherent_overlap(alpha: complex, beta: complex) -> complex:
    """<alpha|beta> = exp(-|alpha|^2/2 - |beta|^2/2 + conj(alpha) beta)."""
    alpha, beta = complex(alpha), complex(beta)
    return cmath.exp(
        -0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + alpha.conjugate() * beta
    )


def recapture_amplitude(mean_n: float, omega: float, delta_t: float) -> float:
    """Recapture amplitude exp(-mean_n (1 - cos(omega delta_t))).

    The modulus of the overlap between a coherent state of mean_n quanta
    and its copy rotated by omega * delta_t; delta_t is the timing offset
    (a later arrival) relative to the reference packet.
    """
    if mean_n < 0:
        raise ValueError("mean_n must be >= 0")
    if delta_t < 0:
        raise ValueError("delta_t must be >= 0")
    return math.exp(-mean_n * (1.0 - math.cos(omega * delta_t)))


def recapture_probability_series(
    mean_n_c: float, omega_c: float, cycle_period: float, j: int, ratio: float
) -> float:
    """Second-order recapture probability for the retuned (slow) trap.

    ``1 - mean_n_c * omega_c^2 * cycle_period^2 * (j-1)^2 * ratio^2`` where
    ratio is the drift-to-return speed ratio.  Agrees with the exact
    exponential ``recapture_amplitude(...)**2`` to fourth order in the small
    phase omega_c * (j-1) * cycle_period * ratio.
    """
    if j < 1:
        raise ValueError("cycle index j must be >= 1")
    if not 0 < ratio <= 1:
        raise ValueError("speed ratio must lie in (0, 1]")
    phase = omega_c * cycle_period * (j - 1) * ratio
    return 1.0 - mean_n_c * phase * phase


def rotate_coherent(alpha: complex, phi: float) -> complex:
    """Number rotation exp(-i phi n) sends |alpha> to |alpha e^{-i phi}>."""
    return complex(alpha) * cmath.exp(-1j * phi)


# ----------------------------------------------------------------------
# truncated-Fock operator machinery

def destroy(n_max: int) -> np.ndarray:
    """Ladder (lowering) operator on the 0..n_max number basis."""
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), 1).astype(complex)


def squeeze_matrix(z: complex, n_max: int) -> np.ndarray:
    """Matrix exponential realization of S(z) = exp[(z a^2 - z* a^+2)/2]."""
    a = destroy(n_max)
    gen = 0.5 * (z * (a @ a) - np.conj(z) * (a.conj().T @ a.conj().T))
    return expm(gen)


def rotation_matrix(phi: float, n_max: int) -> np.ndarray:
    """Number rotation exp(-i phi n) on the truncated basis."""
    return np.diag(np.exp(-1j * phi * np.arange(n_max + 1)))


def displacement_matrix(alpha: complex, n_max: int) -> np.ndarray:
    """Matrix exponential realization of D(alpha) = exp(alpha a^+ - a* a)."""
    a = destroy(n_max)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def squeeze_amplitude(alpha1: complex, beta1: complex, z: complex) -> complex:
    """Two-photon transition amplitude <alpha1| S(z) |beta1> in closed form.

    With z = r e^{i phi}, C = cosh r, S = sinh r:

        C^{-1/2} exp[-(|a1|^2 + |b1|^2)/2 + conj(a1) b1 / C]
                 exp[(S/C)(b1^2 e^{i phi} - conj(a1)^2 e^{-i phi}) / 2]
    """
    alpha1, beta1, z = complex(alpha1), complex(beta1), complex(z)
    r = abs(z)
    phi = cmath.phase(z) if r > 0 else 0.0
    cr, sr = math.cosh(r), math.sinh(r)
    ac = alpha1.conjugate()
    return (
        cr**-0.5
        * cmath.exp(-0.5 * (abs(alpha1) ** 2 + abs(beta1) ** 2) + ac * beta1 / cr)
        * cmath.exp(
            0.5
            * (sr / cr)
            * (beta1**2 * cmath.exp(1j * phi) - ac**2 * cmath.exp(-1j * phi))
        )
    )


def squeeze_amplitude_numeric(
    alpha1: complex, beta1: complex, z: complex, n_max: int | None = None
) -> complex:
    """Same amplitude from the matrix exponential in a truncated basis."""
    if n_max is None:
        mean = max(abs(alpha1) ** 2, abs(beta1) ** 2, 1.0)
        n_max = fock_cutoff(mean, 1e-14, squeezing=True)
    bra = coherent_fock(alpha1, n_max, tail_tol=1e-9)
    ket = coherent_fock(beta1, n_max, tail_tol=1e-9)
    S = squeeze_matrix(z, n_max)
    return complex(np.vdot(bra.amps, S @ ket.amps))


def displacement_transfer(beta: complex, n_max: int | None = None) -> np.ndarray:
    """Truncated unitary taking the coherent packet |beta> to the ground
    state: the displacement by -beta (the final Raman transfer)."""
    beta = complex(beta)
    if n_max is None:
        n_max = max(8, fock_cutoff(abs(beta) ** 2, 1e-12, squeezing=True))
    return displacement_matrix(-beta, n_max)


# ----------------------------------------------------------------------
# full-transfer condition

@dataclass(frozen=True)
class TransferSolution:
    """Roots of the full-transfer quadratic plus a residual report."""

    roots: tuple[float, ...]          # admissible |beta| values (modulus-1 transfers)
    best_modulus: float               # max transfer modulus over |beta| >= 0
    best_beta_mag: float              # where that maximum is attained

    @property
    def feasible(self) -> bool:
        return len(self.roots) > 0

    @property
    def residual(self) -> float:
        return abs(1.0 - self.best_modulus)


def transfer_modulus(
    alpha_c: CoherentLabel, beta_mag: float, gamma: float, sq: SqueezeParams
) -> float:
    """Modulus of <beta| (squeeze o rotation) |alpha_c> for beta = |b| e^{i gamma}."""
    a = abs(alpha_c.alpha)
    gc = alpha_c.phase
    cr, sr = math.cosh(sq.r), math.sinh(sq.r)
    t1 = -0.5 * (a * a + beta_mag * beta_mag)
    t2 = (a * beta_mag / cr) * math.cos(-gamma + gc - sq.phi_rot)
    t3 = 0.5 * (sr / cr) * a * a * math.cos(2 * gc - 2 * sq.phi_rot + sq.phi_sq)
    t4 = -0.5 * (sr / cr) * beta_mag * beta_mag * math.cos(2 * gamma + sq.phi_sq)
    return cr**-0.5 * math.exp(t1 + t2 + t3 + t4)


def solve_full_transfer(
    alpha_c: CoherentLabel, gamma: float, sq: SqueezeParams
) -> TransferSolution:
    """Positive |beta| roots for which the transfer modulus equals one.

    The log of the transfer modulus is a downward quadratic in |beta|;
    modulus one holds exactly on the roots of

        a1 |beta|^2 + b1 |beta| + c1 = 0

    with a1 = 1 + (S/C) cos(2 gamma + phi_sq),
         b1 = -2 |alpha_c| cos(-gamma + gamma_c - phi_rot) / C,
         c1 = ln C + |alpha_c|^2 (1 - (S/C) cos(2 gamma_c - 2 phi_rot + phi_sq)).

    With r = 0 and gamma = gamma_c - phi_rot the unique root is
    |beta| = |alpha_c| exactly.  When no positive real root exists the
    returned solution carries the best achievable modulus instead.
    """
    a_mag = abs(alpha_c.alpha)
    gc = alpha_c.phase
    cr, sr = math.cosh(sq.r), math.sinh(sq.r)
    a1 = 1.0 + (sr / cr) * math.cos(2 * gamma + sq.phi_sq)
    b1 = -2.0 * a_mag * math.cos(-gamma + gc - sq.phi_rot) / cr
    c1 = math.log(cr) + a_mag * a_mag * (
        1.0 - (sr / cr) * math.cos(2 * gc - 2 * sq.phi_rot + sq.phi_sq)
    )
    # a1 >= 1 - tanh(r) > 0, so the parabola opens upward and the modulus
    # peaks at beta* = -b1 / (2 a1), clipped to beta >= 0.
    beta_star = max(0.0, -b1 / (2 * a1))
    best_mod = transfer_modulus(alpha_c, beta_star, gamma, sq)

    disc = b1 * b1 - 4.0 * a1 * c1
    roots: list[float] = []
    if disc == 0.0:
        roots = [-b1 / (2 * a1)]
    elif disc > 0.0:
        sq_d = math.sqrt(disc)
        roots = [(-b1 - sq_d) / (2 * a1), (-b1 + sq_d) / (2 * a1)]
    roots = sorted(x for x in roots if x > 0.0)
    return TransferSolution(
        roots=tuple(roots), best_modulus=best_mod, best_beta_mag=beta_star
    )
