"""Unitary DFT along the time axis and circulant frequency filters.

Conventions: the basis matrix has entries Psi[t, u] = exp(+2i pi u t / T) /
sqrt(T), so the forward (analysis) transform applies exp(-2i pi u t / T) and
both directions carry the 1/sqrt(T) factor. All time-domain operators are
circulant (periodic boundary), which makes them exactly diagonalizable by
the Fourier basis; an operator with kernel h acts as (H L)_t = sum_d h_d
L_{t-d} and has frequency response chi_u = sum_d h_d exp(-2i pi u d / T).

The Fourier dictionary is the only one implemented; any other orthonormal
time dictionary (wavelets, say) would slot in behind the same
forward/inverse surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .stream import LinkStreamMatrix

#: imaginary residue above this magnitude is an error when realifying output
IMAG_TOL = 1e-9


@dataclass(frozen=True)
class FourierBasis:
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("window length must be positive")

    def matrix(self) -> np.ndarray:
        """Dense unitary DFT matrix (oracle and inspection use)."""
        t = np.arange(self.length)
        return np.exp(2j * np.pi * np.outer(t, t) / self.length) / np.sqrt(self.length)

    def forward(self, values: np.ndarray) -> np.ndarray:
        """Analysis transform along axis 0: F = conj(Psi).T @ values."""
        return np.fft.fft(np.asarray(values), axis=0) / np.sqrt(self.length)

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        """Synthesis transform along axis 0: values = Psi @ coeffs."""
        return np.fft.ifft(np.asarray(coeffs), axis=0) * np.sqrt(self.length)

    def frequencies(self) -> np.ndarray:
        """Cyclic frequency u/T per index."""
        return np.arange(self.length) / self.length


@dataclass(frozen=True)
class FrequencyFilter:
    """Diagonal frequency response chi_u, one complex entry per index."""

    response: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        r = np.asarray(self.response, dtype=np.complex128).copy()
        if r.ndim != 1 or r.size < 1:
            raise ValueError("frequency response must be a nonempty vector")
        r.setflags(write=False)
        object.__setattr__(self, "response", r)

    @property
    def length(self) -> int:
        return int(self.response.size)

    @cached_property
    def is_conjugate_symmetric(self) -> bool:
        idx = (-np.arange(self.length)) % self.length
        return bool(np.allclose(self.response[idx], np.conj(self.response), atol=1e-12))

    def compose(self, other: "FrequencyFilter") -> "FrequencyFilter":
        if other.length != self.length:
            raise ValueError("filter lengths differ")
        return FrequencyFilter(self.response * other.response,
                               label=f"{self.label}*{other.label}")


@dataclass(frozen=True)
class CirculantOperator:
    """Time-domain circulant operator with kernel h: (H L)_t = sum h_d L_{t-d}."""

    kernel: np.ndarray = field(repr=False)

    def __post_init__(self):
        k = np.asarray(self.kernel, dtype=np.float64).copy()
        k.setflags(write=False)
        object.__setattr__(self, "kernel", k)

    @property
    def length(self) -> int:
        return int(self.kernel.size)

    def matrix(self) -> np.ndarray:
        t = self.length
        idx = (np.arange(t)[:, None] - np.arange(t)[None, :]) % t
        return self.kernel[idx]

    def frequency_filter(self) -> FrequencyFilter:
        """Eigenvalues under the Fourier basis: chi = DFT of the kernel."""
        return FrequencyFilter(np.fft.fft(self.kernel))

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        """Exact time-domain application by shifted sums (axis 0)."""
        values = np.asarray(values)
        out = np.zeros_like(values, dtype=np.result_type(values, self.kernel))
        for d in np.nonzero(self.kernel)[0]:
            out += self.kernel[d] * np.roll(values, d, axis=0)
        return out


def aggregation_operator(window: int, length: int) -> CirculantOperator:
    """k-sample aggregation: each row sums the current and k-1 previous rows."""
    if not (1 <= window <= length):
        raise ValueError(f"aggregation window {window} out of range 1..{length}")
    kernel = np.zeros(length)
    kernel[:window] = 1.0
    return CirculantOperator(kernel)


def time_diff_operator(length: int) -> CirculantOperator:
    """Circular first difference; high-pass with chi_0 = 0."""
    kernel = np.zeros(length)
    kernel[0] = 1.0
    kernel[1] = -1.0
    return CirculantOperator(kernel)


def aggregation_filter(window: int, length: int) -> FrequencyFilter:
    f = aggregation_operator(window, length).frequency_filter()
    return FrequencyFilter(f.response, label=f"agg:{window}")


def diff_filter(length: int) -> FrequencyFilter:
    return FrequencyFilter(time_diff_operator(length).frequency_filter().response, label="diff")


def lowpass_filter(cutoff: float, length: int) -> FrequencyFilter:
    """Ideal low-pass keeping cyclic frequencies with |u/T| <= cutoff."""
    if not (0.0 <= cutoff <= 0.5):
        raise ValueError("cutoff is a cyclic frequency in [0, 0.5]")
    u = np.arange(length)
    folded = np.minimum(u, length - u) / length
    return FrequencyFilter((folded <= cutoff + 1e-12).astype(np.complex128),
                           label=f"lowpass:{cutoff}")


def allpass_filter(length: int) -> FrequencyFilter:
    return FrequencyFilter(np.ones(length), label="allpass")


def dft_forward(stream: LinkStreamMatrix) -> np.ndarray:
    """Frequency-relational representation F, complex T x M."""
    return FourierBasis(stream.num_times).forward(stream.values)


def dft_inverse(coeffs: np.ndarray, like: LinkStreamMatrix) -> LinkStreamMatrix:
    """Invert dft_forward back to a real stream on the window of ``like``."""
    vals = FourierBasis(like.num_times).inverse(coeffs)
    return like.with_values(_realify(vals))


def _realify(values: np.ndarray, tol: float = IMAG_TOL) -> np.ndarray:
    residue = float(np.max(np.abs(values.imag))) if np.iscomplexobj(values) else 0.0
    if residue > tol:
        raise ValueError(
            f"imaginary residue {residue:.3e} exceeds {tol:.0e};"
            " the frequency response is not conjugate-symmetric")
    return values.real.copy() if np.iscomplexobj(values) else values


def apply_frequency_filter(stream: LinkStreamMatrix, filt: FrequencyFilter) -> LinkStreamMatrix:
    """L_hat = Psi diag(chi) conj(Psi).T L via the FFT."""
    if filt.length != stream.num_times:
        raise ValueError("filter length does not match the stream window")
    basis = FourierBasis(stream.num_times)
    out = basis.inverse(filt.response[:, None] * basis.forward(stream.values))
    return stream.with_values(_realify(out))


def aggregate(stream: LinkStreamMatrix, window: int) -> LinkStreamMatrix:
    """Exact k-sample aggregation by shifted sums (integer-exact)."""
    op = aggregation_operator(window, stream.num_times)
    return stream.with_values(op.apply_values(stream.values))


def time_diff(stream: LinkStreamMatrix) -> LinkStreamMatrix:
    """Circular first difference along time."""
    op = time_diff_operator(stream.num_times)
    return stream.with_values(op.apply_values(stream.values))
