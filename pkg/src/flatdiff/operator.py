"""Monotone discretization of the nonlocal diffusion operator.

The operator acts on a grid function ``u`` as

    (D u)(x_i) = sum_k w_k (u(x_i + k h) - u(x_i))
               + (c0 / 2) (u(x_i + h) + u(x_i - h) - 2 u(x_i))
               + far-tail boundary terms,

where ``w_k`` is the exact kernel mass of the cell ``((k-1/2)h, (k+1/2)h)``
for ``1 <= |k| <= n-1`` and ``c0 = h^-2 int_{|z|<=h/2} z^2 J(z) dz`` replaces
the innermost singular cell by a second difference of matching local mass.
Displacements beyond the outermost cells are folded into two scalar tail
coefficients weighting the boundary extension values. Every off-diagonal
coefficient is nonnegative, so a forward Euler step with ``dt * W <= 1``
(``W`` the diagonal coefficient) is a convex combination of field values;
comparison and maximum principles hold by construction.

Both apply paths share the same padded-array assembly: ``apply`` runs the
direct correlation sum, ``apply_fft`` evaluates the identical correlation by
zero-padded FFT and must agree to roundoff.
"""

from __future__ import annotations

import numpy as np
import scipy.fft

from .kernels import (
    KernelSpec,
    HypothesisCertificate,
    exterior_mass,
    interval_mass,
    restricted_second_moment,
    validate_hypothesis,
)
from .mesh import BoundaryModel, Field, Grid
from .quadrature import integrate_tail

__all__ = ["DiscreteOperator", "UnverifiedKernelError", "discretize"]


class UnverifiedKernelError(ValueError):
    """The kernel failed admissibility validation and force was not set."""


class DiscreteOperator:
    """Precomputed weights for one (kernel, grid, boundary) combination."""

    def __init__(
        self,
        spec: KernelSpec,
        grid: Grid,
        boundary: BoundaryModel,
        certificate: HypothesisCertificate,
    ) -> None:
        self.spec = spec
        self.grid = grid
        self.boundary = boundary
        self.certificate = certificate
        n, h = grid.n, grid.h

        k = np.arange(1, n)
        w = interval_mass(spec, (k - 0.5) * h, (k + 0.5) * h)
        c0 = restricted_second_moment(spec, h / 2.0) / (h * h)

        stencil = np.zeros(2 * n - 1)
        stencil[n:] = w
        stencil[: n - 1] = w[::-1]
        stencil[n] += 0.5 * c0
        stencil[n - 2] += 0.5 * c0

        self.near_weights = w
        self.inner_coefficient = c0
        tail_cut = (n - 0.5) * h
        self.far_tail_coefficients = (
            exterior_mass(spec, tail_cut),
            exterior_mass(spec, tail_cut),
        )
        self._tail_cut = tail_cut
        self._stencil = stencil
        self._stencil_sum = float(stencil.sum())
        self.row_sum = self._stencil_sum + sum(self.far_tail_coefficients)
        self._fft_cache: tuple[int, np.ndarray] | None = None
        self._alg_far_shape: np.ndarray | None = None

    # -- assembly ----------------------------------------------------------

    def _right_pad(self, values: np.ndarray) -> tuple[np.ndarray, float]:
        """Exterior samples right of the grid and the far-field amplitude."""
        n = self.grid.n
        b = self.boundary
        if b.right == "zero":
            return np.zeros(n - 1), 0.0
        if b.right == "constant":
            return np.full(n - 1, b.right_value), b.right_value
        exponent = 2.0 * self.spec.s
        amp = b.fit_tail_amplitude(self.grid, values, exponent)
        x_ext = self.grid.x_max + self.grid.h * np.arange(1, n)
        return amp * x_ext ** (-exponent), amp

    def _padded(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = self.grid.n
        left = np.full(n - 1, self.boundary.left_value)
        right, amp = self._right_pad(values)
        padded = np.concatenate([left, values, right])
        far = self._far_terms(amp)
        return padded, far

    def _algebraic_far_shape(self) -> np.ndarray:
        """Per-node ``int_tail (x_i + z)^(-2s) J(z) dz`` beyond the cells."""
        if self._alg_far_shape is None:
            from .kernels import eval_kernel

            ex = 2.0 * self.spec.s
            cut = self._tail_cut
            shape = np.empty(self.grid.n)
            for i, xi in enumerate(self.grid.points()):
                shape[i] = integrate_tail(
                    lambda z: (xi + z) ** (-ex) * eval_kernel(self.spec, z),
                    cut,
                    rel_tol=1e-10,
                )[0]
            self._alg_far_shape = shape
        return self._alg_far_shape

    def _far_terms(self, right_amp: float) -> np.ndarray:
        t_left, t_right = self.far_tail_coefficients
        base = self.boundary.left_value * t_left
        if self.boundary.right == "zero":
            return np.full(self.grid.n, base)
        if self.boundary.right == "constant":
            return np.full(self.grid.n, base + self.boundary.right_value * t_right)
        return base + right_amp * self._algebraic_far_shape()

    # -- evaluation --------------------------------------------------------

    def _direct_values(self, values: np.ndarray) -> np.ndarray:
        padded, far = self._padded(values)
        conv = np.correlate(padded, self._stencil, mode="valid")
        return conv - values * self.row_sum + far

    def _fft_values(self, values: np.ndarray, workers: int = 1) -> np.ndarray:
        n = self.grid.n
        padded, far = self._padded(values)
        m = scipy.fft.next_fast_len(len(padded) + len(self._stencil) - 1)
        if self._fft_cache is None or self._fft_cache[0] != m:
            self._fft_cache = (m, scipy.fft.rfft(self._stencil[::-1], m))
        conv = scipy.fft.irfft(
            scipy.fft.rfft(padded, m, workers=workers) * self._fft_cache[1],
            m,
            workers=workers,
        )
        window = conv[2 * (n - 1): 2 * (n - 1) + n]
        return window - values * self.row_sum + far

    def apply(self, u: Field) -> Field:
        """Direct correlation sum; O(n^2), the reference path."""
        self._check_field(u)
        return u.with_values(self._direct_values(u.values))

    def apply_fft(self, u: Field, workers: int = 1) -> Field:
        """Same correlation via zero-padded FFT; O(n log n)."""
        self._check_field(u)
        return u.with_values(self._fft_values(u.values, workers))

    def _check_field(self, u: Field) -> None:
        if u.grid != self.grid:
            raise ValueError("field grid does not match operator grid")


def discretize(
    spec: KernelSpec,
    grid: Grid,
    boundary: BoundaryModel,
    *,
    certificate: HypothesisCertificate | None = None,
    force: bool = False,
) -> DiscreteOperator:
    """Build the discrete operator, gated on kernel admissibility.

    A certificate is computed if not supplied. An unverified kernel is
    rejected unless ``force=True`` (useful for kernels that violate the tail
    envelopes but still define a perfectly good monotone scheme, such as
    truncated tails).
    """
    if certificate is None:
        certificate = validate_hypothesis(spec)
    if not certificate.verified and not force:
        raise UnverifiedKernelError(
            f"kernel {spec.describe()} failed admissibility validation "
            f"(upper_margin={certificate.upper_margin:.3e}, "
            f"lower_margin={certificate.lower_margin:.3e}, "
            f"near_moment={certificate.near_moment:.3e}); "
            "pass force=True to discretize anyway"
        )
    return DiscreteOperator(spec, grid, boundary, certificate)
