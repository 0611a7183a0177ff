"""Graph sequence data model and on-disk dataset layout.

A dataset directory holds ``params.json``, the observed snapshots under
``snapshots/`` and, when generated synthetically, the ground truth under
``truth/`` (next adjacency matrix, VAR matrix, factors and the latent
trajectory). All matrices are MatrixMarket files.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError
from .mmio import read_matrix, write_matrix


def _freeze(arr):
    out = np.array(arr, dtype=np.float64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class GraphSequence:
    """Ordered adjacency matrices A_0..A_T of a time-evolving graph.

    Snapshots are n x n, entrywise nonnegative and finite; there are
    T + 1 of them (at least one transition). Instances are immutable and
    safe to share across workers.
    """

    snapshots: tuple

    def __init__(self, snapshots):
        snaps = tuple(_freeze(s) for s in snapshots)
        if len(snaps) < 2:
            raise ValueError(f"need at least 2 snapshots, got {len(snaps)}")
        first = snaps[0]
        if first.ndim != 2 or first.shape[0] != first.shape[1]:
            raise DimensionError(f"snapshots must be square, got shape {first.shape}")
        for t, s in enumerate(snaps):
            if s.shape != first.shape:
                raise DimensionError(
                    f"snapshot {t} has shape {s.shape}, expected {first.shape}"
                )
            if not np.all(np.isfinite(s)):
                raise ValueError(f"snapshot {t} has non-finite entries")
            if np.any(s < 0):
                raise ValueError(f"snapshot {t} has negative entries")
        object.__setattr__(self, "snapshots", snaps)

    @property
    def n(self):
        return self.snapshots[0].shape[0]

    @property
    def horizon(self):
        """Number of observed transitions T (there are T + 1 snapshots)."""
        return len(self.snapshots) - 1

    def __len__(self):
        return len(self.snapshots)

    def __iter__(self):
        return iter(self.snapshots)

    def __getitem__(self, idx):
        return self.snapshots[idx]


@dataclass(frozen=True)
class TruthRecord:
    """Ground truth attached to a synthetic dataset."""

    A_next: np.ndarray
    W0: np.ndarray
    V0: np.ndarray
    U_trajectory: tuple


@dataclass(frozen=True)
class SyntheticDataset:
    sequence: GraphSequence
    truth: TruthRecord
    params: dict
    clamped_fraction: float
    raw_snapshots: tuple  # pre-clamp snapshots, for diagnostics


def save_dataset(dataset, out_dir):
    """Write a SyntheticDataset as a dataset directory."""
    out = Path(out_dir)
    (out / "snapshots").mkdir(parents=True, exist_ok=True)
    (out / "truth").mkdir(parents=True, exist_ok=True)
    for t, snap in enumerate(dataset.sequence):
        write_matrix(snap, out / "snapshots" / f"A_{t:03d}.mtx")
    write_matrix(dataset.truth.A_next, out / "truth" / "A_next.mtx")
    write_matrix(dataset.truth.W0, out / "truth" / "W0.mtx")
    write_matrix(dataset.truth.V0, out / "truth" / "V0.mtx")
    for t, U in enumerate(dataset.truth.U_trajectory):
        write_matrix(U, out / "truth" / f"U_{t:03d}.mtx")
    meta = dict(dataset.params)
    meta["clamped_fraction"] = dataset.clamped_fraction
    with open(out / "params.json", "w", encoding="ascii") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_sequence(data_dir):
    """Load the observed GraphSequence from a dataset directory."""
    snap_dir = Path(data_dir) / "snapshots"
    paths = sorted(snap_dir.glob("A_*.mtx"))
    if not paths:
        raise FileNotFoundError(f"no snapshot files under {snap_dir}")
    return GraphSequence([read_matrix(p) for p in paths])


def load_truth(data_dir):
    """Load the TruthRecord from a dataset directory, or None if absent."""
    truth_dir = Path(data_dir) / "truth"
    if not (truth_dir / "A_next.mtx").exists():
        return None
    u_paths = sorted(truth_dir.glob("U_*.mtx"))
    return TruthRecord(
        A_next=_freeze(read_matrix(truth_dir / "A_next.mtx")),
        W0=_freeze(read_matrix(truth_dir / "W0.mtx")),
        V0=_freeze(read_matrix(truth_dir / "V0.mtx")),
        U_trajectory=tuple(_freeze(read_matrix(p)) for p in u_paths),
    )
