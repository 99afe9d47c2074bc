"""
Main entry point for graspkit.
"""
import sys

from cli.commands import main as cli_main
from utils.logging import get_log_level, setup_logging


def main() -> int:
    """Application entry point."""
    setup_logging(get_log_level())
    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
