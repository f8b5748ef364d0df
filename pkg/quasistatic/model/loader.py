"""
Problem definitions from JSON/YAML documents.

Densities are referenced by preset name plus parameters, e.g.

    {"dissipation": {"name": "abs", "scale": 1.0},
     "energy": {"name": "double_well", "gamma": 0.1},
     "tensor": {"name": "identity"},
     "force": {"name": "ramp", "slope": 1.0, "profile": "sine"},
     "initial": "zero", "T": 2.0, "d": 2}
"""
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Union

from ..config import load_document
from ..logger import get_logger
from .data import FORCE_PRESETS, INITIAL_PRESETS, TENSOR_PRESETS, ProblemSpec
from .models import ModelError
from .potentials import DISSIPATION_PRESETS, ENERGY_PRESETS

logger = get_logger(__name__)


def _entry(document: Mapping[str, Any], key: str) -> Dict[str, Any]:
    if key not in document:
        raise ModelError(f"problem definition lacks '{key}'")
    value = document[key]
    if isinstance(value, str):
        return {'name': value}
    if not isinstance(value, Mapping) or 'name' not in value:
        raise ModelError(f"'{key}' must be a preset name or a mapping with a 'name'")
    return dict(value)


def _build(kind: str, registry: Dict[str, Callable[..., Any]], entry: Dict[str, Any], **extra: Any) -> Any:
    params = dict(entry)
    name = params.pop('name')
    factory = registry.get(name)
    if factory is None:
        raise ModelError(f"unknown {kind} preset '{name}' (known: {', '.join(sorted(registry))})")
    try:
        return factory(**params, **extra)
    except TypeError as e:
        raise ModelError(f"bad parameters for {kind} preset '{name}': {e}") from e


def problem_from_dict(document: Mapping[str, Any]) -> ProblemSpec:
    """Build a ProblemSpec from a parsed document.

    Args:
        document: Mapping with keys dissipation, energy, tensor, force, initial, T, d

    Returns:
        The problem definition (Poincare constant not yet computed)

    Raises:
        ModelError: On missing keys, unknown presets or invalid parameters
    """
    try:
        horizon = float(document['T'])
        dimension = int(document['d'])
    except KeyError as e:
        raise ModelError(f"problem definition lacks {e}") from e
    components = int(document.get('m', 1))

    initial_entry = _entry(document, 'initial')
    spec = ProblemSpec(
        dissipation=_build('dissipation', DISSIPATION_PRESETS, _entry(document, 'dissipation')),
        energy=_build('energy', ENERGY_PRESETS, _entry(document, 'energy')),
        tensor=_build('tensor', TENSOR_PRESETS, _entry(document, 'tensor'),
                      components=components, dimension=dimension),
        force=_build('force', FORCE_PRESETS, _entry(document, 'force'), components=components),
        initial=_build('initial', INITIAL_PRESETS, initial_entry, components=components),
        horizon=horizon,
        dimension=dimension,
        components=components,
        third_derivative_bound=document.get('third_derivative_bound'),
        name=str(document.get('name', 'custom')),
        initial_name=initial_entry['name'],
    )
    logger.debug(f"Loaded problem '{spec.name}': {spec.describe()}")
    return spec


def load_problem(source: Union[str, Path, Mapping[str, Any]]) -> ProblemSpec:
    """Load a problem from a document path or an already parsed mapping."""
    if isinstance(source, Mapping):
        return problem_from_dict(source)
    return problem_from_dict(load_document(Path(source)))
