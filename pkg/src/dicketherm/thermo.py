"""Phase structure: critical temperature, partition-ratio, order parameter.

Convention note: every thermal factor in this package is tanh(beta*Omega/4),
with the 4 in the denominator.  Part of the literature writes the analogous
factor as tanh(beta*Omega/2); the two conventions differ by a factor of two
in beta_c.  Here beta_c = (4/Omega) * atanh(Omega*omega0 / (g1+g2)^2).

The choice matters for quantitative oracle comparisons.  Brute-force
finite-N partition ratios ln(Z_N / Z0_N) extrapolate (Richardson in 1/N)
to the tanh(beta*Omega/2) variant of the same fluctuation sum, not to the
value returned by log_partition_ratio; at omega0=Omega=1, g1=0.6, g2=0.3,
beta=1 the exact-diagonalization ladder tends to ~0.2455 while the
quarter-argument sum gives 0.11652.  The quarter-argument convention is
kept throughout because beta_c, the spectrum anchors, and the order
parameter are internally consistent with it; cross-checks against exact
diagonalization should compare trends, not absolute fluctuation values.

The normal/superradiant classification runs on the closed-form bound
(g1+g2)^2/(Omega*omega0) * tanh(beta*Omega/4): below one the frequency
product converges (normal phase), above one the static mode condenses.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate, optimize

from dicketherm.matsubara import (
    DEFAULT_CUTOFF,
    fermionic_lorentzian_sum,
    kernel_a,
    kernel_c,
    kernel_determinant_coefficients,
    tanh_factor,
)
from dicketherm.operators import ModelParams

__all__ = [
    "CRITICAL_PHASE_TOL",
    "PhasePoint",
    "classify_phase",
    "convergence_bound",
    "critical_beta",
    "log_partition_ratio",
    "order_parameter",
    "phase_point",
    "phase_scan",
    "quantum_critical_gap",
]

# |bound - 1| below this is labelled critical; exact equality is measure-zero.
CRITICAL_PHASE_TOL = 1e-9


@dataclass(frozen=True)
class PhasePoint:
    """Classified thermodynamic state at one (params, beta) node.

    ``rho`` is photons per atom; positive exactly in the superradiant
    phase.  ``error`` is set (and the numeric fields are NaN) on rows
    where evaluation failed inside a scan.
    """

    params: ModelParams
    beta: float
    bound: float
    phase: str
    beta_c: float | None
    rho: float
    error: str | None = None


def critical_beta(params: ModelParams) -> float | None:
    """Inverse critical temperature, or None when no transition exists.

    beta_c = (4/Omega) * atanh(Omega*omega0 / (g1+g2)^2), defined only for
    (g1+g2)^2 > omega0*Omega.  Equality is the quantum-critical point.
    """
    g = params.g1 + params.g2
    product = params.omega0 * params.Omega
    if g**2 <= product:
        return None
    return 4.0 / params.Omega * math.atanh(product / g**2)


def quantum_critical_gap(params: ModelParams) -> float:
    """(g1 + g2) - sqrt(omega0 * Omega); positive iff a finite beta_c exists."""
    return params.g1 + params.g2 - math.sqrt(params.omega0 * params.Omega)


def convergence_bound(params: ModelParams, beta: float) -> float:
    """Closed form of a0(0) + 2*c0(0); the phase boundary sits at 1."""
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    g = params.g1 + params.g2
    return g**2 / (params.Omega * params.omega0) * tanh_factor(params, beta)


def classify_phase(params: ModelParams, beta: float) -> str:
    bound = convergence_bound(params, beta)
    if abs(bound - 1.0) < CRITICAL_PHASE_TOL:
        return "critical"
    return "normal" if bound < 1.0 else "superradiant"


def _ratio_log_integrand_factory(params: ModelParams, beta: float):
    """log of the omega>0 determinant factor as a function of omega.

    (1 - a(omega))(1 - a(-omega)) - 4 c(omega)^2 evaluated at bosonic
    omega equals (omega^4 + B omega^2 + C) / ((omega^2 + omega0^2)
    (omega^2 + Omega^2)) with the shared quadratic coefficients; the
    rational form avoids cancellation near the transition.
    """
    B, C = kernel_determinant_coefficients(params, beta)
    w0sq = params.omega0**2
    Wsq = params.Omega**2

    def f(omega: float) -> float:
        o2 = omega * omega
        return math.log((o2 * o2 + B * o2 + C) / ((o2 + w0sq) * (o2 + Wsq)))

    def f_prime(omega: float) -> float:
        o2 = omega * omega
        return (
            (4.0 * o2 + 2.0 * B) * omega / (o2 * o2 + B * o2 + C)
            - 2.0 * omega / (o2 + w0sq)
            - 2.0 * omega / (o2 + Wsq)
        )

    return f, f_prime


def log_partition_ratio(
    params: ModelParams, beta: float, cutoff: int = DEFAULT_CUTOFF
) -> float:
    """ln(Z/Z0) per atom-free normalization, leading order in large N.

    Static term -1/2 ln[(1 - a(0))^2 - 4 c(0)^2] plus the omega>0 sum of
    -ln[(1-a)(1-a~) - 4c^2], tail-corrected and Richardson extrapolated
    over (cutoff, 2*cutoff).  Defined in the normal phase only; the
    product diverges at the transition and the formula does not continue
    past it.
    """
    if cutoff < 10:
        raise ValueError("cutoff must be at least 10")
    bound = convergence_bound(params, beta)
    if bound >= 1.0 - CRITICAL_PHASE_TOL:
        raise ValueError(
            f"log_partition_ratio requires the normal phase; "
            f"convergence bound {bound:.6g} is not below 1"
        )
    a0 = kernel_a(0, params, beta).real
    c0 = kernel_c(0, params, beta)
    static = -0.5 * math.log((1.0 - a0) ** 2 - 4.0 * c0**2)

    f, f_prime = _ratio_log_integrand_factory(params, beta)
    h = 2.0 * math.pi / beta

    def corrected(m_cut: int) -> float:
        omegas = h * np.arange(1, m_cut + 1)
        o2 = omegas**2
        B, C = kernel_determinant_coefficients(params, beta)
        logs = np.log(
            (o2**2 + B * o2 + C)
            / ((o2 + params.omega0**2) * (o2 + params.Omega**2))
        )
        edge = h * (m_cut + 0.5)
        integral, _ = integrate.quad(f, edge, np.inf, limit=200)
        tail = integral / h + (h / 24.0) * f_prime(edge)
        return float(np.sum(logs)) + tail

    coarse, fine = corrected(cutoff), corrected(2 * cutoff)
    weight = 2.0**5
    return static - (weight * fine - coarse) / (weight - 1.0)


def order_parameter(
    params: ModelParams, beta: float, *, cutoff: int = DEFAULT_CUTOFF
) -> float:
    """Photons per atom from the static saddle point.

    The static effective potential per atom, in the variable
    y = pi x^2 / N, is Phi(y) = -y + sum_p ln(1 + kappa y / (p^2 +
    Omega^2/4)) with kappa = (g1+g2)^2 / (beta omega0) and p fermionic.
    Phi is strictly concave, Phi'(0) = bound - 1, so the maximizer is the
    unique positive root of Phi' when the bound exceeds one and y = 0
    otherwise.  Photons per atom is rho = y* / (beta omega0).

    The stationarity condition is solved on the numerically summed
    frequency series; the closed-form resummation of the same product is
    reserved for the test oracle.
    """
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    if convergence_bound(params, beta) <= 1.0:
        return 0.0
    kappa = (params.g1 + params.g2) ** 2 / (beta * params.omega0)
    quarter_gap_sq = 0.25 * params.Omega**2

    def phi_prime(y: float) -> float:
        m = math.sqrt(quarter_gap_sq + kappa * y)
        return kappa * fermionic_lorentzian_sum(m, beta, cutoff) - 1.0

    hi = 1.0
    for _ in range(200):
        if phi_prime(hi) < 0.0:
            break
        hi *= 2.0
    else:
        raise RuntimeError(
            f"order-parameter bracket expansion failed: Phi'({hi}) still "
            f"positive after 200 doublings"
        )
    try:
        y_star = optimize.brentq(phi_prime, 0.0, hi, xtol=1e-15, rtol=1e-15)
    except RuntimeError as exc:  # pragma: no cover - brentq rarely fails
        raise RuntimeError(
            f"order-parameter solve did not converge on bracket "
            f"[0, {hi}]: {exc}"
        ) from exc
    return y_star / (beta * params.omega0)


def phase_point(params: ModelParams, beta: float) -> PhasePoint:
    """Evaluate one grid node: bound, label, beta_c, order parameter."""
    bound = convergence_bound(params, beta)
    phase = classify_phase(params, beta)
    rho = order_parameter(params, beta) if phase == "superradiant" else 0.0
    return PhasePoint(
        params=params,
        beta=beta,
        bound=bound,
        phase=phase,
        beta_c=critical_beta(params),
        rho=rho,
    )


def _scan_node(node: tuple[ModelParams, float]) -> PhasePoint:
    params, beta = node
    try:
        return phase_point(params, beta)
    except Exception as exc:
        return PhasePoint(
            params=params,
            beta=beta,
            bound=math.nan,
            phase="error",
            beta_c=None,
            rho=math.nan,
            error=f"{type(exc).__name__}: {exc}",
        )


def phase_scan(
    params_grid: Sequence[ModelParams],
    beta_grid: Sequence[float],
    *,
    workers: int | None = None,
) -> list[PhasePoint]:
    """Cartesian scan, params outer and beta inner, deterministic order.

    Node failures never abort the scan; they surface as rows with the
    ``error`` field set and NaN numerics.
    """
    if not params_grid or not beta_grid:
        raise ValueError("phase_scan requires non-empty grids")
    nodes = [(p, b) for p in params_grid for b in beta_grid]
    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_scan_node, nodes))
    return [_scan_node(node) for node in nodes]
