#!/usr/bin/env python3
"""
Demo script for the Determinantal Lab.
"""

import sys
from pathlib import Path

# Add the current directory to Python path
sys.path.insert(0, str(Path(__file__).parent))

from determinantal_lab.main import run

DATA_DIR = Path(__file__).parent / 'determinantal_lab' / 'data'


def run_demo():
    """Run a short tour of the lab's subcommands on the bundled data files."""
    print("Determinantal Lab Demo")
    print("=" * 50)

    steps = [
        ("Validating the identity kernel", ['validate', '--kernel', str(DATA_DIR / 'identity3.json')]),
        ("Enumerating spanning trees of K3", ['ust', '--graph', str(DATA_DIR / 'k3.json'), '--enumerate']),
        ("Comparing the oracle with the determinant formula",
         ['oracle', '--subspace', str(DATA_DIR / 'k3_star.json'), '--include', 'ab']),
        ("Complete coupling of the characters of Z_4", ['couple', 'zn', '--n', '4', '--check-only']),
        ("Gram-Schmidt lines without a complete coupling", ['couple', 'lines', '--check-only']),
        ("Negative association on a small battery",
         ['experiments', 'negative-association', '--n', '5', '--trials', '10', '--seed', '7']),
    ]

    for title, argv in steps:
        print("\n" + "=" * 50)
        print(title)
        code = run(argv)
        print(f"(exit code {code})")

    print("\n" + "=" * 50)
    print("Demo completed!")


if __name__ == '__main__':
    run_demo()
