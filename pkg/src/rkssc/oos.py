"""Out-of-sample assignment by distance to per-cluster subspaces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from rkssc.kernel import center_with_means, kernel_vector
from rkssc.npt import NptModel, project


@dataclass
class ClusterModel:
    """Per-cluster mean and orthonormal basis.

    ``means[m]`` has length R and ``bases[m]`` shape ``(R, d_m)`` with
    ``d_m = min(d, N_m, R)``. ``label_values``, when set, maps the m-th
    subspace to the label reported for it.
    """

    means: list
    bases: list
    counts: list
    d: int
    label_values: list | None = None

    @property
    def n_clusters(self):
        return len(self.means)

    @property
    def dims(self):
        return [B.shape[1] for B in self.bases]

    def residuals(self, Yq):
        """Distances of the columns of ``Yq`` to every cluster, shape ``(c, M)``."""
        Yq = np.asarray(Yq, dtype=float)
        if Yq.ndim == 1:
            Yq = Yq[:, None]
        out = np.empty((self.n_clusters, Yq.shape[1]))
        for m, (mu, B) in enumerate(zip(self.means, self.bases)):
            Z = Yq - mu[:, None]
            out[m] = np.linalg.norm(Z - B @ (B.T @ Z), axis=0)
        return out

    def predict(self, Yq):
        # argmin returns the first minimum: ties go to the lowest cluster index
        idx = np.argmin(self.residuals(Yq), axis=0)
        return idx if self.label_values is None else np.asarray(self.label_values)[idx]

    def to_dict(self):
        return {"d": self.d, "counts": list(self.counts),
                "means": [m.tolist() for m in self.means],
                "bases": [B.tolist() for B in self.bases],
                "label_values": None if self.label_values is None else
                [int(v) for v in self.label_values]}

    @classmethod
    def from_dict(cls, d):
        means = [np.asarray(m, dtype=float) for m in d["means"]]
        bases = [np.asarray(B, dtype=float).reshape(len(mu), -1)
                 for B, mu in zip(d["bases"], means)]
        return cls(means=means, bases=bases, counts=list(d["counts"]), d=int(d["d"]),
                   label_values=d.get("label_values"))


def fit_subspaces(Y, labels, d=5) -> ClusterModel:
    """Mean and leading left singular vectors of each cluster's coordinates.

    Raises
    ------
    ValueError
        If a label in ``0..max(labels)`` has no members.
    """
    Y = np.asarray(Y, dtype=float)
    labels = np.asarray(labels)
    if labels.shape != (Y.shape[1],):
        raise ValueError("labels must have one entry per column of Y")
    if d < 1:
        raise ValueError("d must be >= 1")
    R = Y.shape[0]
    means, bases, counts = [], [], []
    for m in range(int(labels.max()) + 1):
        members = Y[:, labels == m]
        if members.shape[1] == 0:
            raise ValueError(f"cluster {m} is empty")
        mu = members.mean(axis=1)
        dm = min(d, members.shape[1], R)
        Um, _, _ = scipy.linalg.svd(members - mu[:, None], full_matrices=False)
        means.append(mu)
        bases.append(Um[:, :dm])
        counts.append(int(members.shape[1]))
    return ClusterModel(means=means, bases=bases, counts=counts, d=int(d))


def assign(model: ClusterModel, y) -> int:
    """Label of the subspace closest to ``y`` (lowest index on ties)."""
    return int(model.predict(np.asarray(y, dtype=float).ravel())[0])


def oos_pipeline(npt: NptModel, model: ClusterModel, x) -> int:
    """Kernel vector, centering, projection and subspace assignment of ``x``."""
    if npt.X is None or npt.spec is None:
        raise ValueError("embedding model carries no training data")
    kv = kernel_vector(npt.spec, npt.X, x)
    y = project(npt, center_with_means(npt.col_means, kv))
    return assign(model, y)
