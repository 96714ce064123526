"""Exit-plane concentration statistics.

The exit cross-section is cut into equal bins; each bin's concentration is
its fraction of species-A tracers. The spread of those values, as a root
mean square about their mean, measures segregation: 0.5 for two untouched
side-by-side streams, about 0 when every bin holds the same mixture.
Mixing efficiency is its reciprocal. The histogram of bin concentrations is
also inspected for its number of peaks: two when segregated, one when mixed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter1d
from scipy.signal import find_peaks

from .errors import InsufficientSamplingError, InvalidParameterError
from .transport import SPECIES_A

__all__ = [
    "ConcentrationProfile",
    "MixingReport",
    "concentration_profile",
    "rms_of_profile",
    "count_histogram_peaks",
    "mixing_report",
    "MIN_RECORDS_PER_BIN",
    "MAX_EMPTY_FRACTION",
]

MIN_RECORDS_PER_BIN = 10
MAX_EMPTY_FRACTION = 0.2


@dataclass(frozen=True)
class ConcentrationProfile:
    """Binned species-A fraction across the exit section.

    Empty bins carry NaN concentration and are excluded from statistics.
    """

    bin_edges: np.ndarray
    counts: np.ndarray
    a_counts: np.ndarray

    @property
    def bin_centers(self):
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def bin_width(self):
        return float(self.bin_edges[1] - self.bin_edges[0])

    @property
    def n_bins(self):
        return self.counts.size

    @property
    def empty(self):
        return self.counts == 0

    @property
    def concentration(self):
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.empty, np.nan, self.a_counts / self.counts)

    @property
    def n_particles(self):
        return int(self.counts.sum())

    def relabeled(self):
        """Same profile with species A and B swapped."""
        return ConcentrationProfile(self.bin_edges, self.counts, self.counts - self.a_counts)


def concentration_profile(records, n_bins=50, width=None, check_sampling=True):
    """Bin exit records across ``[-width/2, width/2]``.

    ``records`` is an ``ExitRecords`` (timed-out tracers are dropped) or any
    object with ``y_exit`` and ``species`` arrays.

    Raises
    ------
    InsufficientSamplingError
        Fewer than 10 records per bin on average, or more than 20 % empty bins.
    """
    if n_bins < 1:
        raise InvalidParameterError("n_bins must be >= 1")
    y = np.asarray(records.y_exit, dtype=float)
    species = np.asarray(records.species)
    keep = ~np.isnan(y)
    y, species = y[keep], species[keep]
    if width is None:
        raise InvalidParameterError("exit section width is required")
    edges = np.linspace(-0.5 * width, 0.5 * width, n_bins + 1)
    counts, _ = np.histogram(y, bins=edges)
    a_counts, _ = np.histogram(y[species == SPECIES_A], bins=edges)
    profile = ConcentrationProfile(edges, counts, a_counts)
    if check_sampling:
        if y.size < MIN_RECORDS_PER_BIN * n_bins:
            raise InsufficientSamplingError(
                f"{y.size} records for {n_bins} bins; need {MIN_RECORDS_PER_BIN} per bin on average"
            )
        empty_fraction = np.mean(profile.empty)
        if empty_fraction > MAX_EMPTY_FRACTION:
            raise InsufficientSamplingError(f"{empty_fraction:.0%} of bins are empty")
    return profile


def rms_of_profile(profile):
    """Root mean square deviation of the bin concentrations about their mean."""
    c = profile.concentration
    c = c[~np.isnan(c)]
    if c.size == 0:
        return float("nan")
    return float(np.sqrt(np.mean((c - c.mean()) ** 2)))


def count_histogram_peaks(values, levels=32, smoothing=3.0, min_prominence=0.25):
    """Number of peaks in the smoothed histogram of concentration values.

    The histogram over ``levels`` equal classes of [0, 1] is smoothed with a
    Gaussian of ``smoothing`` classes (zero padding, so the end classes can
    be peaks). Peaks whose prominence is below ``min_prominence`` times the
    tallest class are ignored: a partly mixed profile puts a broad plateau of
    intermediate values between the two pure-species peaks, and sampling
    noise ripples on that plateau must not count as extra modes.
    """
    values = np.asarray(values, dtype=float)
    values = values[~np.isnan(values)]
    hist, _ = np.histogram(values, bins=levels, range=(0.0, 1.0))
    pad = int(np.ceil(4 * smoothing)) + 1
    padded = np.concatenate([np.zeros(pad), hist.astype(float), np.zeros(pad)])
    if smoothing > 0:
        padded = gaussian_filter1d(padded, smoothing, mode="constant")
    top = padded.max()
    if top <= 0:
        return 0
    peaks, _ = find_peaks(padded, prominence=min_prominence * top)
    return int(peaks.size)


@dataclass(frozen=True)
class MixingReport:
    rms: float
    efficiency: float
    normalized_index: float
    peak_count: int
    n_particles: int
    n_bins: int
    noise_floor: float


def mixing_report(profile, levels=32, smoothing=3.0, min_prominence=0.25):
    """RMS, efficiency (1 / RMS floored at binomial noise), index M and peak count."""
    sigma = rms_of_profile(profile)
    n = profile.n_particles
    floor = float(np.sqrt(0.25 / (n / profile.n_bins))) if n else float("inf")
    return MixingReport(
        rms=sigma,
        efficiency=1.0 / max(sigma, floor),
        normalized_index=1.0 - sigma / 0.5,
        peak_count=count_histogram_peaks(profile.concentration, levels, smoothing, min_prominence),
        n_particles=n,
        n_bins=profile.n_bins,
        noise_floor=floor,
    )
