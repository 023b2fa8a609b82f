"""Planning and analysis suite for GPU-like ASIC accelerators.

Generates parameterized reference designs, finds fmax by static timing
analysis, applies memory-division and pipeline transforms toward frequency
targets, estimates PPA, simulates SIMT kernel execution and reports raw
and area-derated speedups against a scalar-CPU baseline.
"""

from importlib import resources

__version__ = "0.1.0"


def data_text(name: str) -> str:
    """Read one of the bundled fixture files (table1.tsv, benchmarks.tsv,
    tech_params.txt, kernels/*)."""
    return resources.files("ggpu.data").joinpath(name).read_text()


def shipped_tech_params():
    """The calibrated technology parameters shipped with the package."""
    from .docio import read_tech_params

    return read_tech_params(data_text("tech_params.txt"))
