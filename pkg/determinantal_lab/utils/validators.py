"""
Input validation utilities.
"""

import math
from pathlib import Path
from typing import List, Optional, Tuple

SEED_LIMIT = 1 << 64


class InputValidator:
    """Validates command-line inputs for the lab."""

    @staticmethod
    def validate_file_path(file_path: str, required_extensions: Optional[List[str]] = None) -> Tuple[bool, str]:
        """
        Validate an input file path.

        Args:
            file_path: Path to validate
            required_extensions: List of allowed file extensions

        Returns:
            Tuple of (is_valid, error_message)
        """
        if not file_path:
            return False, "File path cannot be empty"

        path = Path(file_path)

        if not path.exists():
            return False, f"File does not exist: {file_path}"

        if not path.is_file():
            return False, f"Path is not a file: {file_path}"

        if required_extensions:
            if path.suffix.lower() not in [ext.lower() for ext in required_extensions]:
                return False, f"File must have one of these extensions: {', '.join(required_extensions)}"

        return True, ""

    @staticmethod
    def validate_output_path(output_path: str, create_dirs: bool = True) -> Tuple[bool, str]:
        """
        Validate an output path, creating parent directories if needed.

        Returns:
            Tuple of (is_valid, error_message)
        """
        if not output_path:
            return False, "Output path cannot be empty"

        parent_dir = Path(output_path).parent
        if not parent_dir.exists():
            if not create_dirs:
                return False, f"Output directory does not exist: {parent_dir}"
            try:
                parent_dir.mkdir(parents=True, exist_ok=True)
            except OSError as e:
                return False, f"Cannot create output directory: {e}"

        if not parent_dir.is_dir():
            return False, f"Output path parent is not a directory: {parent_dir}"

        return True, ""

    @staticmethod
    def validate_seed(seed: int) -> Tuple[bool, str]:
        """Seeds are unsigned 64-bit integers."""
        if not isinstance(seed, int) or isinstance(seed, bool):
            return False, "Seed must be an integer"

        if not 0 <= seed < SEED_LIMIT:
            return False, "Seed must lie in [0, 2^64)"

        return True, ""

    @staticmethod
    def validate_tolerance(tolerance: float) -> Tuple[bool, str]:
        if not isinstance(tolerance, (int, float)) or not math.isfinite(tolerance):
            return False, "Tolerance must be a finite number"

        if tolerance < 0 or tolerance >= 1:
            return False, "Tolerance must lie in [0, 1)"

        return True, ""

    @staticmethod
    def validate_count(count: int, minimum: int = 1, maximum: Optional[int] = None) -> Tuple[bool, str]:
        """
        Validate a positive count such as a number of draws or trials.

        Returns:
            Tuple of (is_valid, error_message)
        """
        if not isinstance(count, int) or isinstance(count, bool):
            return False, "Count must be an integer"

        if count < minimum:
            return False, f"Count must be at least {minimum}"

        if maximum is not None and count > maximum:
            return False, f"Count cannot exceed {maximum}"

        return True, ""

    @staticmethod
    def validate_probability(value: float, open_interval: bool = False) -> Tuple[bool, str]:
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            return False, "Value must be a finite number"

        if open_interval and not 0 < value < 1:
            return False, "Value must lie strictly between 0 and 1"

        if not 0 <= value <= 1:
            return False, "Value must lie in [0, 1]"

        return True, ""

    @staticmethod
    def validate_labels(labels: List[str], known: Tuple[str, ...]) -> Tuple[bool, str]:
        """Every label must belong to the ground set."""
        unknown = [label for label in labels if label not in known]
        if unknown:
            return False, f"Unknown labels: {', '.join(unknown)}"

        return True, ""
