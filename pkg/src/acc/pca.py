"""Principal-component decomposition of the RGB channels.

Each pixel's (r, g, b) triplet is an observation; the 3x3 channel
covariance is diagonalized and every pixel is projected onto the three
eigenvectors, giving three scalar planes ordered by explained variance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ObservationMatrix:
    data: np.ndarray  # 3 x n, centered
    mean: np.ndarray  # length-3 channel mean

    @property
    def p(self):
        return self.data.shape[0]

    @property
    def n(self):
        return self.data.shape[1]


@dataclass
class PcDecomposition:
    basis: np.ndarray        # 3x3 orthonormal, columns = component directions
    eigenvalues: np.ndarray  # descending, >= 0
    planes: list             # three (H, W) float64 planes
    mean: np.ndarray


def build_observation_matrix(img):
    """Stack pixels column-wise in raster order and center per channel."""
    img = np.asarray(img, dtype=np.float64)
    x = img.reshape(-1, 3).T
    mean = x.mean(axis=1)
    return ObservationMatrix(data=x - mean[:, None], mean=mean)


def pca_transform(obs, width, height):
    """Eigendecompose the channel covariance and project every pixel.

    Covariance uses 1/(n-1); eigenpairs come from the SVD of the symmetric
    3x3 covariance.  Sign convention: each component direction is flipped so
    its largest-magnitude entry is positive; eigenvalue ties keep the
    original axis order (SVD order is already stable for a fixed input).
    """
    x = obs.data
    n = obs.n
    cov = (x @ x.T) / (n - 1)
    u, s, _ = np.linalg.svd(cov, hermitian=True)
    # enforce the deterministic sign convention
    for k in range(3):
        col = u[:, k]
        j = int(np.argmax(np.abs(col)))
        if col[j] < 0:
            u[:, k] = -col
    proj = u.T @ x  # 3 x n
    planes = [proj[k].reshape(height, width) for k in range(3)]
    return PcDecomposition(basis=u, eigenvalues=s, planes=planes, mean=obs.mean)
