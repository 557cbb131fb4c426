"""Optional FCIDUMP fixture generator for molecular active spaces.

Produces active-space integral files consumable by any FCIDUMP reader, plus
reference RHF/CCSD energies for cross-checks. Requires PySCF at runtime;
everything degrades to a clear "optional component" error without it.
"""

from .generate import (
    GenerationSummary,
    GeometrySpec,
    ToolkitUnavailableError,
    generate_fcidump,
)

__version__ = "0.1.0"
