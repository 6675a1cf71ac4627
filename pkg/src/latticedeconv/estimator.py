"""Scikit-learn style wrapper around the deconvolution estimator."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .deconv import DeconvKernel, estimate_cf_form, estimate_direct
from .fields import FieldSample, NoiseModel


class DeconvolutionKDE(BaseEstimator):
    """Deconvolution kernel density estimator with a fit/predict API.

    Parameters mirror the functional interface: band-limited kernel
    (``kernel`` tag plus ``order`` for the polynomial family), noise tag
    and parameters, and a fixed bandwidth.  ``fit`` stores the noisy
    observations; ``predict`` evaluates the latent-density estimate.
    """

    def __init__(self, kernel="polynomial", order=3, noise="laplace", noise_params=None, bandwidth=0.1, form="direct"):
        self.kernel = kernel
        self.order = order
        self.noise = noise
        self.noise_params = noise_params
        self.bandwidth = bandwidth
        self.form = form

    def _components(self):
        kernel = DeconvKernel(tag=self.kernel, order=self.order)
        noise = NoiseModel.from_tag(self.noise, **(self.noise_params or {}))
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.form not in ("direct", "cf"):
            raise ValueError(f"unknown estimator form: {self.form!r}")
        return kernel, noise

    def fit(self, y, X=None):
        """Store the noisy sample; accepts a FieldSample or a 1-d array."""
        self._components()  # validate parameters eagerly
        if isinstance(y, FieldSample):
            self.observations_ = y.values
        else:
            self.observations_ = np.asarray(y, dtype=float).ravel()
        if self.observations_.size == 0:
            raise ValueError("sample must be nonempty")
        return self

    def predict(self, x):
        if not hasattr(self, "observations_"):
            raise RuntimeError("estimator is not fitted")
        kernel, noise = self._components()
        grid = np.atleast_1d(np.asarray(x, dtype=float))
        order = np.argsort(grid)
        runner = estimate_direct if self.form == "direct" else estimate_cf_form
        est = runner(self.observations_, kernel, noise, self.bandwidth, grid[order])
        return est.values[np.argsort(order)]

    def score_samples(self, x):
        return self.predict(x)
