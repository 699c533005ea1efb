"""
Linear prediction kernels for VoiceGuard
Burg LPC recursion and companion-matrix polynomial roots
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy import linalg

from backend.core.exceptions import InvalidParameterError

MAX_ROOT_DEGREE = 32
NEWTON_POLISH_STEPS = 3


@dataclass
class LpcResult:
    """Burg predictor of one frame"""
    coefficients: np.ndarray  # a[1..order] of A(z) = 1 + sum a_k z^-k
    reflection: np.ndarray
    error_powers: List[float] = field(default_factory=list)  # index m = error after order m
    zero_energy: bool = False

    @property
    def order(self) -> int:
        return int(self.coefficients.size)

    @property
    def error_power(self) -> float:
        return self.error_powers[-1]

    @property
    def is_minimum_phase(self) -> bool:
        """All roots of A(z) inside the unit circle, i.e. every |reflection| < 1"""
        return bool(np.all(np.abs(self.reflection) < 1.0))

    @property
    def polynomial(self) -> np.ndarray:
        """A(z) coefficients [1, a1, ..., ap]"""
        return np.concatenate([[1.0], self.coefficients])


def lpc_burg(frame: np.ndarray, order: int) -> LpcResult:
    """
    Burg's method: minimize forward plus backward prediction error

    Args:
        frame: Sample window, longer than order
        order: Predictor order (0 allowed)

    Returns:
        LpcResult with every |reflection| <= 1; the bound is strict (minimum phase)
        unless the frame is perfectly predictable. Zero-energy frames get all-zero
        coefficients and the zero_energy flag
    """
    x = np.asarray(frame, dtype=np.float64).ravel()
    if order < 0:
        raise InvalidParameterError(f"LPC order must be non-negative, got {order}")
    if x.size <= order:
        raise InvalidParameterError(f"Frame of {x.size} samples is too short for order {order}")

    power = float(np.mean(x ** 2))
    if order == 0:
        return LpcResult(np.zeros(0), np.zeros(0), [power], zero_energy=power == 0.0)
    if power == 0.0:
        return LpcResult(np.zeros(order), np.zeros(order), [0.0] * (order + 1), zero_energy=True)

    a = np.array([1.0])
    reflection = np.zeros(order)
    errors = [power]
    forward = x[1:].copy()
    backward = x[:-1].copy()

    for m in range(order):
        denominator = np.dot(forward, forward) + np.dot(backward, backward)
        if denominator <= 0.0:
            # Perfectly predicted already; higher orders add nothing
            a = np.concatenate([a, np.zeros(order - m)])
            errors.extend([errors[-1]] * (order - m))
            break
        k = -2.0 * np.dot(forward, backward) / denominator
        reflection[m] = k

        extended = np.concatenate([a, [0.0]])
        a = extended + k * extended[::-1]
        errors.append(errors[-1] * (1.0 - k * k))

        forward, backward = forward + k * backward, backward + k * forward
        forward = forward[1:]
        backward = backward[:-1]

    return LpcResult(coefficients=a[1:], reflection=reflection, error_powers=errors)


def poly_roots(coeffs: np.ndarray) -> np.ndarray:
    """
    Roots of a real polynomial via companion-matrix eigenvalues

    Args:
        coeffs: Coefficients, highest degree first; leading coefficient nonzero

    Returns:
        Complex array of the degree-many roots (empty for degree 0)
    """
    c = np.atleast_1d(np.asarray(coeffs, dtype=np.float64))
    if c.size == 0 or c[0] == 0.0:
        raise InvalidParameterError("Leading coefficient must be nonzero")
    degree = c.size - 1
    if degree > MAX_ROOT_DEGREE:
        raise InvalidParameterError(f"Degree {degree} exceeds {MAX_ROOT_DEGREE}")
    if degree == 0:
        return np.zeros(0, dtype=complex)

    roots = linalg.eigvals(linalg.companion(c)).astype(complex)

    # Newton polish; keep a step only when it lowers the residual
    derivative = np.polyder(c)
    for _ in range(NEWTON_POLISH_STEPS):
        values = np.polyval(c, roots)
        slopes = np.polyval(derivative, roots)
        safe = slopes != 0
        candidate = roots.copy()
        candidate[safe] = roots[safe] - values[safe] / slopes[safe]
        better = np.abs(np.polyval(c, candidate)) < np.abs(values)
        roots = np.where(better, candidate, roots)
    return roots
