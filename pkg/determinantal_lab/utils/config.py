"""
Experiment configuration: JSON file values overridden by command-line flags.
"""

from dataclasses import dataclass, fields, replace
from typing import Any, Dict, Optional

from ..core.errors import FileFormatError
from .file_handler import FileHandler


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Parameters shared by the experiment suites. ``None`` means the suite's
    own default applies.
    """

    n: Optional[int] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    ensemble: Optional[str] = None
    max_support: Optional[int] = None
    draws: Optional[int] = None

    @classmethod
    def from_dict(cls, payload: Any, source: str = '<config>') -> 'ExperimentConfig':
        """
        Raises:
            FileFormatError: On unknown keys or values of the wrong type
        """
        if not isinstance(payload, dict):
            raise FileFormatError(f"{source}: expected a JSON object at the top level")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(payload) - known)
        if unknown:
            raise FileFormatError(f"{source}: unknown keys {', '.join(unknown)}")
        for name, value in payload.items():
            expected = str if name == 'ensemble' else int
            if value is not None and (isinstance(value, bool) or not isinstance(value, expected)):
                raise FileFormatError(f"{source}: field '{name}' must be of type {expected.__name__}")
        return cls(**payload)

    @classmethod
    def load(cls, file_path: str) -> 'ExperimentConfig':
        return cls.from_dict(FileHandler.read_json(file_path), file_path)

    def merged(self, overrides: Dict[str, Any]) -> 'ExperimentConfig':
        """Copy with every non-None override applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def resolve(self, defaults: Dict[str, Any]) -> Dict[str, Any]:
        """Field values with ``None`` filled in from ``defaults``."""
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        return {k: (defaults.get(k) if v is None else v) for k, v in values.items()}
