"""Entry point for running as a module: python -m shift_spectra."""

from shift_spectra.cli import app

if __name__ == "__main__":
    app()
