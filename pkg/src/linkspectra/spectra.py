"""Joint frequency-structure analysis of link streams: L = Psi C Phi.

The coefficient matrix C = conj(Psi).T L Phi.T is indexed by temporal
frequency (rows) and graph-basis element (columns, scaling first). Joint
filters scale rows by a frequency response and columns by a structural
response; backbones retain a selected subset of coefficients; regularity
metrics take squared norms of the time and relation derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .graphbasis import GraphBasis, _clear_inert, detail_pass_response
from .partition import partition_svd
from .stream import LinkStreamMatrix
from .timebasis import (
    FourierBasis,
    FrequencyFilter,
    _realify,
    apply_frequency_filter,
)


@dataclass(frozen=True)
class CoefficientMatrix:
    """Complex T x M coefficient grid plus everything needed to invert it."""

    values: np.ndarray = field(repr=False)
    basis: GraphBasis
    fourier: FourierBasis
    space: object
    t0: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128).copy()
        if v.shape != (self.fourier.length, self.basis.num_relations):
            raise ValueError("coefficient grid shape does not match the bases")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def num_times(self) -> int:
        return self.values.shape[0]

    @property
    def num_relations(self) -> int:
        return self.values.shape[1]

    @cached_property
    def magnitude(self) -> np.ndarray:
        m = np.abs(self.values)
        m.setflags(write=False)
        return m

    def with_values(self, values) -> "CoefficientMatrix":
        return CoefficientMatrix(values, self.basis, self.fourier, self.space, self.t0)


@dataclass(frozen=True)
class JointFilter:
    """Frequency response (rows) and structural response (columns)."""

    freq: FrequencyFilter
    struct: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.asarray(self.struct, dtype=np.float64).copy()
        if s.ndim != 1:
            raise ValueError("structural response must be a vector")
        s.setflags(write=False)
        object.__setattr__(self, "struct", s)


def default_basis(stream: LinkStreamMatrix, level: int = None, seed: int = 0) -> GraphBasis:
    """Basis fixed from the all-time aggregate graph via SVD partitioning."""
    tree = partition_svd(stream.aggregate_graph(), seed=seed)
    return GraphBasis(tree, level)


def time_structure(stream: LinkStreamMatrix, basis: GraphBasis) -> np.ndarray:
    """X = L Phi.T; row t holds the decomposition coefficients of G_t."""
    return basis.analyze_values(stream.values)


def structure_split(x: np.ndarray, basis: GraphBasis):
    """Split X = [S, W] into scaling and wavelet blocks."""
    return x[:, : basis.num_scaling], x[:, basis.num_scaling :]


def freq_relational(stream: LinkStreamMatrix) -> np.ndarray:
    """F = conj(Psi).T L; column k holds the Fourier transform of e_k(t)."""
    return FourierBasis(stream.num_times).forward(stream.values)


def decompose(stream: LinkStreamMatrix, basis: GraphBasis,
              fourier: FourierBasis = None) -> CoefficientMatrix:
    """C = conj(Psi).T L Phi.T; graph-then-time and time-then-graph agree."""
    if basis.num_relations != stream.num_relations:
        raise ValueError("graph basis does not match the stream's relation space")
    fourier = fourier or FourierBasis(stream.num_times)
    if fourier.length != stream.num_times:
        raise ValueError("Fourier basis does not match the stream window")
    c = fourier.forward(basis.analyze_values(stream.values))
    return CoefficientMatrix(c, basis, fourier, stream.space, stream.t0)


def reconstruct(coeffs: CoefficientMatrix) -> LinkStreamMatrix:
    """L = Psi C Phi, realified (imaginary residue above tolerance is an error)."""
    x = coeffs.fourier.inverse(coeffs.values)
    vals = _clear_inert(coeffs.space, coeffs.basis.synthesize_values(x))
    return LinkStreamMatrix(coeffs.space, coeffs.t0, _realify(vals))


def apply_joint_filter(stream: LinkStreamMatrix, jf: JointFilter,
                       basis: GraphBasis) -> LinkStreamMatrix:
    """L_hat = Psi Lambda_H C Lambda_Q Phi in one pass through C."""
    c = decompose(stream, basis)
    filtered = jf.freq.response[:, None] * c.values * jf.struct[None, :]
    return reconstruct(c.with_values(filtered))


def apply_joint_filter_sequential(stream: LinkStreamMatrix, jf: JointFilter,
                                  basis: GraphBasis) -> LinkStreamMatrix:
    """Equivalent two-step path: H^(filt) L followed by L Q^(filt)."""
    intermediate = apply_frequency_filter(stream, jf.freq)
    x = basis.analyze_values(intermediate.values) * jf.struct[None, :]
    return stream.with_values(_clear_inert(stream.space, basis.synthesize_values(x)))


@dataclass(frozen=True)
class KeepRule:
    """Coefficient selection for backbone extraction.

    ``top``: keep the k largest |C| entries (ties broken by frequency then
    basis index). ``box``: keep folded frequencies u0..u1 (a frequency u
    counts as min(u, T-u), so the conjugate mirror is kept too and real
    streams reconstruct to real backbones) crossed with basis columns k0..k1.
    """

    mode: str
    top: int = 0
    freq_range: tuple = None
    col_range: tuple = None

    @staticmethod
    def top_k(k: int) -> "KeepRule":
        if k < 1:
            raise ValueError("top-k selection needs k >= 1")
        return KeepRule("top", top=k)

    @staticmethod
    def box(freq_lo: int, freq_hi: int, col_lo: int, col_hi: int) -> "KeepRule":
        if freq_lo > freq_hi or col_lo > col_hi:
            raise ValueError("empty selection box")
        return KeepRule("box", freq_range=(freq_lo, freq_hi), col_range=(col_lo, col_hi))

    def mask(self, coeffs: CoefficientMatrix) -> np.ndarray:
        t, m = coeffs.values.shape
        if self.mode == "top":
            if self.top > t * m:
                raise ValueError("top-k selection larger than the coefficient grid")
            mag = coeffs.magnitude
            u, k = np.unravel_index(np.arange(t * m), (t, m))
            order = np.lexsort((k, u, -mag.ravel()))
            mask = np.zeros(t * m, dtype=bool)
            mask[order[: self.top]] = True
            return mask.reshape(t, m)
        if self.mode == "box":
            if not (0 <= self.freq_range[0] and self.freq_range[1] <= t // 2):
                raise ValueError(f"folded frequency box must lie in 0..{t // 2}")
            if not (0 <= self.col_range[0] and self.col_range[1] < m):
                raise ValueError(f"column box must lie in 0..{m - 1}")
            folded = np.minimum(np.arange(t), t - np.arange(t))
            fr = (folded >= self.freq_range[0]) & (folded <= self.freq_range[1])
            cols = np.zeros(m, dtype=bool)
            cols[self.col_range[0] : self.col_range[1] + 1] = True
            return fr[:, None] & cols[None, :]
        raise ValueError(f"unknown keep mode {self.mode!r}")


def backbone(stream: LinkStreamMatrix, basis: GraphBasis, keep: KeepRule):
    """Reconstruct the stream from the selected coefficients only.

    Returns the filtered stream and the boolean kept mask over (frequency,
    basis element).
    """
    coeffs = decompose(stream, basis)
    mask = keep.mask(coeffs)
    if not mask.any():
        raise ValueError("backbone selection is empty")
    kept = np.where(mask, coeffs.values, 0.0)
    return reconstruct(coeffs.with_values(kept)), mask


@dataclass(frozen=True)
class RegularityReport:
    reg_t: float
    reg_e: float
    boundary: str = "circular"

    @property
    def reg(self) -> float:
        return self.reg_t + self.reg_e

    def as_dict(self) -> dict:
        return {"reg_t": self.reg_t, "reg_e": self.reg_e, "reg": self.reg,
                "boundary": self.boundary}


def _time_derivative(values: np.ndarray, boundary: str) -> np.ndarray:
    if boundary == "circular":
        return values - np.roll(values, 1, axis=0)
    if boundary == "linear":
        return values[1:] - values[:-1]
    raise ValueError("boundary must be 'circular' or 'linear'")


def regularity(stream: LinkStreamMatrix, basis: GraphBasis,
               boundary: str = "circular") -> RegularityReport:
    """Total variation along time and relations.

    reg_t = ||H^(diff) L||_F^2 counts (for unweighted streams) the edge
    changes between consecutive graphs; reg_e = ||L Q^(diff)||_F^2 is the
    summed graph regularity of the slices.
    """
    dt = _time_derivative(stream.values, boundary)
    reg_t = float(np.sum(dt * dt))
    x = basis.analyze_values(stream.values) * detail_pass_response(basis)[None, :]
    de = _clear_inert(stream.space, basis.synthesize_values(x))
    reg_e = float(np.sum(de * de))
    return RegularityReport(reg_t, reg_e, boundary)


def relaxed_time_regularity(stream: LinkStreamMatrix, basis: GraphBasis,
                            boundary: str = "circular") -> float:
    """||H^(diff) S||_F^2 on the scaling block; zero iff the slices are
    structurally equal at the basis level."""
    s = time_structure(stream, basis)[:, : basis.num_scaling]
    ds = _time_derivative(s, boundary)
    return float(np.sum(ds * ds))
