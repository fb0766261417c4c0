# colorlab/__main__.py
import sys

from colorlab.cli import main

if __name__ == "__main__":
    sys.exit(main())
