#!/usr/bin/env python3
"""
Determinantal Lab Launcher
This script can be run directly from a checkout to launch the lab CLI.
"""

import sys
from pathlib import Path

# Add the current directory to Python path
current_dir = Path(__file__).parent
sys.path.insert(0, str(current_dir))

# Import and run the main function
from determinantal_lab.main import main

if __name__ == '__main__':
    main()
