"""scikit-learn style front ends.

The models have no trainable state: ``fit`` validates the
hyperparameters and freezes the derived configuration, and ``predict``
maps rows of detunings (and entrance times) to excitation probabilities.
This lets fringe curves be produced inside pipelines, grid searches and
other tooling that expects the estimator protocol.

Column layouts accepted by :meth:`RamseyFringeModel.predict`:

* 1 column: ``delta``; detunings ``(-delta, +delta)``, entrance ``entrance_time``
* 2 columns: ``delta, t0``
* 3 columns: ``delta1, delta2, t0``
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from . import analytic
from .core import PhysicalConstants, SequenceConfig
from .ensemble import PhaseSpaceGaussian, SpatialConfig, averaged_p12_closed, averaged_p12_quadrature
from .numeric import IntegratorParams, PictureTag, p12_numeric_many
from .pulses import EnvelopeKind, Mesa, area_normalized_peak, envelope_from_dict

__all__ = ["RamseyFringeModel", "EnsembleFringeModel", "CHUNK_ROWS"]

# fixed work-unit size: chunking never depends on the thread count, so
# results are bitwise identical for any n_jobs
CHUNK_ROWS = 128


def _resolve_jobs(n_jobs) -> int:
    if n_jobs is None or n_jobs == 0:
        return 1
    if n_jobs < 0:
        return max(1, (os.cpu_count() or 1) + 1 + n_jobs)
    return int(n_jobs)


def _chunked_map(func, X: np.ndarray, n_jobs) -> np.ndarray:
    chunks = [X[i:i + CHUNK_ROWS] for i in range(0, len(X), CHUNK_ROWS)]
    jobs = _resolve_jobs(n_jobs)
    if jobs == 1 or len(chunks) <= 1:
        parts = [func(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(func, chunks))
    return np.concatenate(parts) if parts else np.zeros(0)


class RamseyFringeModel(BaseEstimator):
    """Excitation probability of a two-pulse sequence versus detuning.

    Parameters
    ----------
    rabi : float
        Peak Rabi frequency of both pulses.
    tau : float
        Pulse duration.
    gap : float
        Free time between the pulses.
    entrance_time : float
        Default ``t0`` when X has a single column.
    engine : {"analytic", "numeric"}
        Closed form (mesa only) or RK4 propagation.
    envelope : str, dict or EnvelopeKind
        Pulse shape; anything :func:`envelope_from_dict` accepts.
    picture : {"i1", "i2", "i3"}
        Interaction picture for the numeric engine.
    step, max_defect : float
        Integrator settings for the numeric engine.
    phi1, phi2 : float
        Field phases at ``t = 0``.
    area_normalized : bool
        Rescale the peak so each pulse has area ``pi/2``. Off by default.
    n_jobs : int or None
        Worker threads used by :meth:`predict`.
    """

    def __init__(self, rabi=math.pi / 2, tau=1.0, gap=5.0, entrance_time=0.0, engine="analytic",
                 envelope="mesa", picture="i1", step=1e-3, max_defect=1e-9, phi1=0.0, phi2=0.0,
                 area_normalized=False, n_jobs=None):
        self.rabi = rabi
        self.tau = tau
        self.gap = gap
        self.entrance_time = entrance_time
        self.engine = engine
        self.envelope = envelope
        self.picture = picture
        self.step = step
        self.max_defect = max_defect
        self.phi1 = phi1
        self.phi2 = phi2
        self.area_normalized = area_normalized
        self.n_jobs = n_jobs

    def _envelope(self) -> EnvelopeKind:
        if isinstance(self.envelope, (str, dict)):
            return envelope_from_dict(self.envelope)
        return self.envelope

    def fit(self, X=None, y=None):
        if self.engine not in ("analytic", "numeric"):
            raise ValueError(f"engine must be 'analytic' or 'numeric', got {self.engine!r}")
        envelope = self._envelope()
        if self.engine == "analytic" and not isinstance(envelope, Mesa):
            raise ValueError("the analytic engine requires mesa pulses")
        rabi = area_normalized_peak(envelope, self.tau) if self.area_normalized else float(self.rabi)
        # validates tau, rabi, gap
        self.template_ = SequenceConfig.two_detuning(
            0.0, 0.0, rabi=rabi, tau=float(self.tau), gap=float(self.gap),
            entrance_time=float(self.entrance_time), envelope=envelope,
            phi1=float(self.phi1), phi2=float(self.phi2),
        )
        self.picture_ = PictureTag.parse(self.picture)
        self.integrator_ = IntegratorParams(self.step, self.max_defect)
        if X is not None:
            X = check_array(X)
            self.n_features_in_ = X.shape[1]
        return self

    def _columns(self, X):
        X = check_array(X, dtype=np.float64)
        if X.shape[1] == 1:
            d = X[:, 0]
            return -d, d, np.full_like(d, self.template_.entrance_time)
        if X.shape[1] == 2:
            return -X[:, 0], X[:, 0], X[:, 1]
        if X.shape[1] == 3:
            return X[:, 0], X[:, 1], X[:, 2]
        raise ValueError(f"X must have 1, 2 or 3 columns, got {X.shape[1]}")

    def sequences(self, X) -> list[SequenceConfig]:
        """One :class:`SequenceConfig` per row of ``X``."""
        check_is_fitted(self, "template_")
        d1, d2, t0 = self._columns(X)
        tpl = self.template_
        return [
            SequenceConfig.two_detuning(
                a, b, rabi=tpl.pulse1.rabi_peak, tau=tpl.pulse1.duration, gap=tpl.gap,
                entrance_time=t, envelope=tpl.pulse1.envelope, phi1=tpl.pulse1.phase, phi2=tpl.pulse2.phase,
            )
            for a, b, t in zip(d1.tolist(), d2.tolist(), t0.tolist())
        ]

    def _predict_chunk(self, X):
        if self.engine == "numeric":
            return p12_numeric_many(self.picture_, self.sequences(X), self.integrator_)
        tpl = self.template_
        if tpl.pulse1.phase or tpl.pulse2.phase:
            return np.array([analytic.two_pulse_state(s).excited_population for s in self.sequences(X)])
        d1, d2, t0 = self._columns(X)
        p = analytic.p12_general(d1, d2, tpl.pulse1.rabi_peak, tpl.pulse1.duration, tpl.gap, t0)
        return np.atleast_1d(np.asarray(p, dtype=float))

    def predict(self, X) -> np.ndarray:
        """Excitation probability for each row of ``X``."""
        check_is_fitted(self, "template_")
        X = check_array(X, dtype=np.float64)
        return _chunked_map(self._predict_chunk, X, self.n_jobs)

    def curve(self, t0: float | None = None):
        """Function ``delta -> P12(-delta, delta)`` at entrance ``t0`` (scalar or array)."""
        check_is_fitted(self, "template_")
        t0 = self.template_.entrance_time if t0 is None else t0

        def f(delta):
            d = np.asarray(delta, dtype=float)
            X = np.column_stack([d.ravel(), np.full(d.size, float(t0))])
            out = _chunked_map(self._predict_chunk, X, self.n_jobs)
            return float(out[0]) if d.ndim == 0 else out.reshape(d.shape)

        return f


class EnsembleFringeModel(BaseEstimator):
    """Phase-space averaged ``<P12(-delta, delta)>`` for a Gaussian atom cloud.

    X has one column (``delta``, cloud centre entrance ``t0_center``) or two
    (``delta, t0_center``). ``rabi=None`` picks a pi/2 pulse at the mean
    velocity. ``oracle=True`` switches to the 2D quadrature.
    """

    def __init__(self, k_mean=1.0, dk=0.1, t0_center=0.0, field_length=1.0, gap_length=5.0, rabi=None,
                 hbar=1.0, mass=1.0, oracle=False, n_points=256, n_jobs=None):
        self.k_mean = k_mean
        self.dk = dk
        self.t0_center = t0_center
        self.field_length = field_length
        self.gap_length = gap_length
        self.rabi = rabi
        self.hbar = hbar
        self.mass = mass
        self.oracle = oracle
        self.n_points = n_points
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        constants = PhysicalConstants(float(self.hbar), float(self.mass))
        self.distribution_ = PhaseSpaceGaussian.from_dk(float(self.k_mean), float(self.dk), float(self.t0_center))
        if self.rabi is None:
            self.spatial_ = SpatialConfig.pi_half_for(
                self.distribution_.k_mean, float(self.field_length), float(self.gap_length), constants)
        else:
            self.spatial_ = SpatialConfig(float(self.field_length), float(self.gap_length), float(self.rabi), constants)
        if X is not None:
            X = check_array(X)
            self.n_features_in_ = X.shape[1]
        return self

    def _predict_chunk(self, X):
        average = averaged_p12_quadrature if self.oracle else averaged_p12_closed
        dist = self.distribution_
        out = np.empty(len(X))
        for i, row in enumerate(X):
            d = dist if X.shape[1] == 1 else PhaseSpaceGaussian(dist.k_mean, dist.dk, dist.dx, float(row[1]))
            out[i] = average(row[0], d, self.spatial_, self.n_points)
        return out

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "distribution_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] not in (1, 2):
            raise ValueError(f"X must have 1 or 2 columns, got {X.shape[1]}")
        return _chunked_map(self._predict_chunk, X, self.n_jobs)

    def curve(self, t0_center: float | None = None):
        check_is_fitted(self, "distribution_")
        t0c = self.distribution_.t0_center if t0_center is None else t0_center

        def f(delta):
            d = np.asarray(delta, dtype=float)
            X = np.column_stack([d.ravel(), np.full(d.size, float(t0c))])
            out = _chunked_map(self._predict_chunk, X, self.n_jobs)
            return float(out[0]) if d.ndim == 0 else out.reshape(d.shape)

        return f
