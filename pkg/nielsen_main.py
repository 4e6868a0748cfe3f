import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from core.cli import run


def main() -> None:
    """Main entry point"""
    try:
        code = run(sys.argv[1:])
    except KeyboardInterrupt:
        sys.stderr.write("\nInterrupted\n")
        code = 1
    sys.exit(code)


if __name__ == "__main__":
    main()
