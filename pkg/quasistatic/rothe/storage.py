"""
Trajectory persistence: one CSV per checkpoint plus a JSON manifest.
"""
import csv
import json
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import numpy as np

from ..logger import get_logger
from ..model.data import ProblemSpec
from .models import Trajectory

logger = get_logger(__name__)

DEFAULT_CHECKPOINTS = 10


def default_checkpoints(steps: int, count: int = DEFAULT_CHECKPOINTS) -> list:
    """Evenly spaced step indices including 0 and N."""
    return sorted({int(round(k)) for k in np.linspace(0, steps, min(count, steps) + 1)})


def _header(dimension: int, components: int) -> list:
    coords = ['x', 'y'][:dimension]
    values = ['u'] if components == 1 else [f'u_{c}' for c in range(components)]
    return ['vertex'] + coords + values


def write_checkpoint(traj: Trajectory, k: int, path: Path) -> Path:
    """Vertex values of u^h_k, boundary vertices included (as zeros)."""
    space = traj.space
    full = space.extend(traj.values[k])
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(_header(space.dimension, space.components))
        for vertex, (point, value) in enumerate(zip(space.mesh.vertices, full)):
            writer.writerow([vertex] + [repr(float(x)) for x in point] + [repr(float(u)) for u in value])
    return path


def save_trajectory(
    traj: Trajectory,
    directory: Path,
    spec: Optional[ProblemSpec] = None,
    checkpoints: Optional[Sequence[int]] = None,
) -> Path:
    """Write checkpoint CSVs and manifest.json into a directory.

    Every certificate is stored with its step index and whether it passed
    the step options of the run; failing steps are also listed together.

    Returns:
        Path of the manifest
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    checkpoints = default_checkpoints(traj.steps) if checkpoints is None else sorted(set(checkpoints))

    entries = []
    for k in checkpoints:
        name = f"step_{k:06d}.csv"
        write_checkpoint(traj, k, directory / name)
        entries.append({'index': k, 't': float(traj.times[k]), 'file': name})

    failed = traj.failed_steps
    rejected = set(failed)
    certificates = [
        {'step': k, 'passed': k not in rejected, **c.to_dict()}
        for k, c in enumerate(traj.certificates, start=1)
    ]
    manifest: Dict[str, Any] = {
        'problem': spec.describe() if spec is not None else None,
        'space': {
            'dimension': traj.space.dimension,
            'components': traj.space.components,
            'h': traj.space.mesh.h,
            'nodes': traj.space.num_nodes,
        },
        'N': traj.steps,
        'tau': traj.tau,
        'times': traj.times.tolist(),
        'checkpoints': entries,
        'initial_margin': traj.initial_margin,
        'step_options': traj.options.to_dict() if traj.options is not None else None,
        'certificates': certificates,
        'failed_steps': failed,
        'all_certificates_passed': not failed,
        'timings': list(traj.timings),
    }
    path = directory / 'manifest.json'
    with open(path, 'w') as f:
        json.dump(manifest, f, indent=2)
    logger.info(f"Saved {len(entries)} checkpoints and manifest to {directory}")
    return path
