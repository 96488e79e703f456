"""Main Entry Point - SETR toolkit"""
import sys

from src.presentation.cli import main as cli_main


def main():
    """Main application entry point"""
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
