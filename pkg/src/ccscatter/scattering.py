"""Wronskian coefficients (a, b), traveling-wave amplitudes and reflection.

Past the support of the perturbation the perturbed solution is a
combination ``u_lam = a(lam) u0 + b(lam) v0``; both coefficients are read
off from Wronskians at x = 1+ (after the last spike):

    b = W[u0, u_lam] = u0' u_lam - u0 u_lam',
    a = -W[v0, u_lam].

For a genuinely complex u0 the pair (u0, conj(u0)) is a traveling-wave
basis and ``u_lam = alpha u0 + beta conj(u0)`` defines the reflection
probability R = |beta/alpha|^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine
from .errors import RealificationRequiredError, TravelingBasisError
from .problem import ScatteringProblem, build_problem, wronskian

_REAL_BASIS_THRESHOLD = 1e-12


@dataclass(frozen=True)
class Coefficients:
    """The pair (a, b) at one coupling value.

    ``method`` records which route produced the values ("ode" or "series"),
    ``err`` is the attached error estimate (certified for the series route).
    """

    a: complex
    b: complex
    lam: complex
    method: str
    err: float

    def is_usable(self, threshold: float = 1e-3) -> bool:
        """Whether the attached error is small against the values."""
        return self.err <= threshold * max(1.0, abs(self.a), abs(self.b))


@dataclass(frozen=True)
class ReflectionResult:
    """Traveling-wave decomposition and reflection probability."""

    alpha: complex
    beta: complex
    R: float
    flux_defect: float


def coefficients_batch(
    problem: ScatteringProblem, lams, *, rtol: float | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (a, b, err) over a batch of couplings."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    M, err = engine.transfer_matrices(problem, lams, rtol=rtol)
    ref = problem.ref
    u0, u0p = ref.u0_at_0
    u = M[:, 0, 0] * u0 + M[:, 0, 1] * u0p
    up = M[:, 1, 0] * u0 + M[:, 1, 1] * u0p
    u1, u1p = ref.u0_at_1
    v1, v1p = ref.v0_at_1
    b = u1p * u - u1 * up
    a = v1 * up - v1p * u
    scale = np.maximum(1.0, np.abs(u) + np.abs(up))
    ref_scale = max(abs(u1), abs(u1p)) + max(abs(v1), abs(v1p))
    err_out = (err + 5e-16 * scale) * ref_scale + 1e-16
    return a, b, err_out


def coefficients(
    problem: ScatteringProblem, lam: complex, *, rtol: float | None = None
) -> Coefficients:
    """Compute (a(lam), b(lam)) by propagation and Wronskians at 1+."""
    a, b, err = coefficients_batch(problem, [lam], rtol=rtol)
    return Coefficients(
        a=complex(a[0]),
        b=complex(b[0]),
        lam=complex(lam),
        method="ode",
        err=float(err[0]),
    )


def b_values(problem: ScatteringProblem, lams, *, rtol: float | None = None) -> np.ndarray:
    """Just b(lam) over a batch; convenience for scans and contours."""
    _, b, _ = coefficients_batch(problem, lams, rtol=rtol)
    return b


def reflection(problem: ScatteringProblem, lam: float) -> ReflectionResult:
    """Reflection probability R = |beta/alpha|^2 at a real coupling.

    Requires a traveling-wave reference solution: W[u0, conj(u0)] must be
    nonzero.  For real-valued u0 there is no traveling basis; realify the
    problem and use the Wronskian-coefficient machinery instead.
    """
    lam = float(lam)
    ref = problem.ref
    u0_0 = ref.u0_at_0
    u0bar_0 = (u0_0[0].conjugate(), u0_0[1].conjugate())
    w_u_ubar = wronskian(u0_0, u0bar_0)
    norm = max(1.0, abs(u0_0[0]) ** 2 + abs(u0_0[1]) ** 2)
    if abs(w_u_ubar) <= _REAL_BASIS_THRESHOLD * norm:
        raise TravelingBasisError(
            "reference solution is (a multiple of) a real solution; "
            "apply realify() and work with the real-solution machinery"
        )
    u1 = engine.propagate(problem, lam, u0_0)
    u0_1 = ref.u0_at_1
    u0bar_1 = (u0_1[0].conjugate(), u0_1[1].conjugate())
    # constancy of W for the zero-coupling equation: same value at 1
    beta = wronskian(u0_1, u1) / w_u_ubar
    alpha = wronskian(u0bar_1, u1) / wronskian(u0bar_1, u0_1)
    R = abs(beta / alpha) ** 2
    flux_defect = abs(abs(alpha) ** 2 - abs(beta) ** 2 - 1.0)
    return ReflectionResult(
        alpha=complex(alpha), beta=complex(beta), R=float(R), flux_defect=float(flux_defect)
    )


def realify(problem: ScatteringProblem) -> ScatteringProblem:
    """Replace u0 by its real part (imaginary part if that vanishes).

    When the real and imaginary parts of u0 are linearly independent the
    identically-vanishing-b question is unchanged by this substitution; when
    they are dependent the problem was a complex multiple of a real one to
    begin with.  The companion v0 is rebuilt from the new data.
    """
    u, up = problem.ref.u0_at_0
    re = (complex(u.real), complex(up.real))
    if re == (0.0, 0.0):
        re = (complex(u.imag), complex(up.imag))
    return build_problem(
        problem.Q,
        problem.V,
        re,
        k_tag=problem.ref.k_tag,
        tolerances=problem.tolerances,
    )


def require_real_reference(problem: ScatteringProblem) -> None:
    """Raise unless u0 is real-valued (realify() provides the reduction)."""
    if not problem.ref.u0_is_real:
        raise RealificationRequiredError(
            "operation requires a real-valued reference solution; "
            "apply realify() first"
        )
