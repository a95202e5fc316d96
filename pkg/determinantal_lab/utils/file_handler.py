"""
File input/output for kernels, subspaces, graphs and result artifacts.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core.errors import FileFormatError, LabError
from ..core.graphs import Edge, Graph
from ..core.ground import GroundSet
from ..core.kernels import DEFAULT_TOLERANCE, Kernel, Subspace
from ..core.sampler import SampleRun


class FileHandler:
    """Reads lab input files and writes artifacts."""

    @staticmethod
    def read_json(file_path: str) -> Any:
        """
        Parse a JSON file.

        Raises:
            FileNotFoundError: If the file doesn't exist
            FileFormatError: On a JSON syntax error (with line and column)
        """
        path = Path(file_path)
        if not path.is_file():
            raise FileNotFoundError(f"File not found: {file_path}")
        text = path.read_text(encoding='utf-8')
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise FileFormatError(
                f"{file_path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc

    @staticmethod
    def _field(payload: Dict, name: str, source: str) -> Any:
        if not isinstance(payload, dict):
            raise FileFormatError(f"{source}: expected a JSON object at the top level")
        if name not in payload:
            raise FileFormatError(f"{source}: missing field '{name}'")
        return payload[name]

    @staticmethod
    def _labels(payload: Dict, source: str) -> GroundSet:
        labels = FileHandler._field(payload, 'labels', source)
        if not isinstance(labels, list) or not all(isinstance(label, str) for label in labels):
            raise FileFormatError(f"{source}: field 'labels' must be a list of strings")
        try:
            return GroundSet(tuple(labels))
        except LabError as exc:
            raise FileFormatError(f"{source}: field 'labels': {exc}") from exc

    @staticmethod
    def _matrix(payload: Dict, rows: int, columns: Optional[int], source: str) -> np.ndarray:
        """Complex matrix from the 're' and optional 'im' fields."""
        parts = []
        for name in ('re', 'im'):
            if name == 'im' and name not in payload:
                parts.append(None)
                continue
            raw = FileHandler._field(payload, name, source)
            if not isinstance(raw, list) or len(raw) != rows:
                raise FileFormatError(f"{source}: field '{name}' must be a list of {rows} rows")
            for index, row in enumerate(raw):
                if not isinstance(row, list):
                    raise FileFormatError(f"{source}: field '{name}[{index}]' must be a list")
                if columns is not None and len(row) != columns:
                    raise FileFormatError(
                        f"{source}: field '{name}[{index}]' has {len(row)} entries, expected {columns}"
                    )
                for position, value in enumerate(row):
                    if isinstance(value, bool) or not isinstance(value, (int, float)):
                        raise FileFormatError(f"{source}: field '{name}[{index}][{position}]' is not a number")
            widths = {len(row) for row in raw}
            if len(widths) > 1:
                raise FileFormatError(f"{source}: field '{name}' has rows of different lengths")
            width = widths.pop() if widths else (columns or 0)
            parts.append(np.array(raw, dtype=float).reshape(rows, width))
        real, imag = parts
        if imag is not None and imag.shape != real.shape:
            raise FileFormatError(f"{source}: fields 're' and 'im' have different shapes")
        return real if imag is None else real + 1j * imag

    @staticmethod
    def _tolerance(payload: Dict, source: str) -> float:
        tolerance = payload.get('tolerance', DEFAULT_TOLERANCE)
        if isinstance(tolerance, bool) or not isinstance(tolerance, (int, float)) or tolerance < 0:
            raise FileFormatError(f"{source}: field 'tolerance' must be a nonnegative number")
        return float(tolerance)

    @staticmethod
    def kernel_from_dict(payload: Dict, source: str = '<kernel>') -> Kernel:
        ground = FileHandler._labels(payload, source)
        entries = FileHandler._matrix(payload, ground.size, ground.size, source)
        return Kernel(ground, entries, FileHandler._tolerance(payload, source))

    @staticmethod
    def kernel_to_dict(kernel: Kernel) -> Dict:
        return {
            'labels': list(kernel.ground.labels),
            're': np.real(kernel.entries).tolist(),
            'im': np.imag(kernel.entries).tolist(),
            'tolerance': kernel.tolerance,
        }

    @staticmethod
    def subspace_from_dict(payload: Dict, source: str = '<subspace>') -> Subspace:
        """Subspace whose orthonormal basis vectors are the columns of re + i·im."""
        ground = FileHandler._labels(payload, source)
        basis = FileHandler._matrix(payload, ground.size, None, source)
        return Subspace(ground, basis, FileHandler._tolerance(payload, source))

    @staticmethod
    def subspace_to_dict(subspace: Subspace) -> Dict:
        return {
            'labels': list(subspace.ground.labels),
            're': np.real(subspace.basis).tolist(),
            'im': np.imag(subspace.basis).tolist(),
            'tolerance': subspace.tolerance,
        }

    @staticmethod
    def graph_from_dict(payload: Dict, source: str = '<graph>') -> Graph:
        vertices = FileHandler._field(payload, 'vertices', source)
        raw_edges = FileHandler._field(payload, 'edges', source)
        if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
            raise FileFormatError(f"{source}: field 'vertices' must be a list of strings")
        if not isinstance(raw_edges, list):
            raise FileFormatError(f"{source}: field 'edges' must be a list")
        edges = []
        for index, raw in enumerate(raw_edges):
            where = f"edges[{index}]"
            if not isinstance(raw, dict):
                raise FileFormatError(f"{source}: field '{where}' must be an object")
            for name in ('id', 'tail', 'head'):
                if not isinstance(raw.get(name), str):
                    raise FileFormatError(f"{source}: field '{where}.{name}' must be a string")
            weight = raw.get('w', 1.0)
            if isinstance(weight, bool) or not isinstance(weight, (int, float)):
                raise FileFormatError(f"{source}: field '{where}.w' must be a number")
            edges.append(Edge(raw['id'], raw['tail'], raw['head'], float(weight)))
        try:
            return Graph(tuple(vertices), tuple(edges))
        except LabError as exc:
            raise FileFormatError(f"{source}: {exc}") from exc

    def read_kernel(self, file_path: str) -> Kernel:
        """
        Read a kernel file {labels, re, im?, tolerance?}.

        Raises:
            FileNotFoundError: If the file doesn't exist
            FileFormatError: If the JSON or a field is malformed
        """
        return self.kernel_from_dict(self.read_json(file_path), file_path)

    def read_subspace(self, file_path: str) -> Subspace:
        return self.subspace_from_dict(self.read_json(file_path), file_path)

    def read_graph(self, file_path: str) -> Graph:
        return self.graph_from_dict(self.read_json(file_path), file_path)

    def read_vectors(self, file_path: str) -> np.ndarray:
        """Rows of re + i·im from a {re, im?} file, one vector per row."""
        payload = self.read_json(file_path)
        rows = self._field(payload, 're', file_path)
        if not isinstance(rows, list) or not rows:
            raise FileFormatError(f"{file_path}: field 're' must be a non-empty list of rows")
        return self._matrix(payload, len(rows), None, file_path)

    @staticmethod
    def dumps(payload: Any) -> str:
        return json.dumps(payload, indent=2, sort_keys=True) + '\n'

    @staticmethod
    def write_text(output_path: str, text: str) -> None:
        with open(output_path, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)

    @staticmethod
    def render_samples(run: SampleRun) -> str:
        """One drawn set per line, labels comma-separated (empty line for the empty set)."""
        return ''.join(line + '\n' for line in run.to_lines())

    @staticmethod
    def vectors_payload(vectors: Sequence[Sequence[complex]]) -> Dict[str, List[List[float]]]:
        matrix = np.asarray(vectors, dtype=complex)
        return {'re': np.real(matrix).tolist(), 'im': np.imag(matrix).tolist()}
