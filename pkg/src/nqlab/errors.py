"""Exception types shared across the package.

The split matters for the CLI and the HTTP service: bad inputs and
unphysical parameter combinations map to exit code 1 (HTTP 400, kind
"input"), while iterative procedures that fail to converge map to exit
code 2 (HTTP 400, kind "nonconvergence").
"""


class NonConvergenceError(RuntimeError):
    """An iterative solver or fit failed to reach its convergence criteria."""


class NotDispersiveError(ValueError):
    """Qubit-resonator detuning too small for a dispersive treatment."""


class RankDeficientModelError(ValueError):
    """Normal equations are singular; the model is degenerate for this data."""
