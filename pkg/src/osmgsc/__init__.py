"""One-shot measurement ground-state cooling toolkit."""

from .basis import BasisIndex, Dims, Propagator
from .core import (OsmgscVerdict, ParamCount, TimeScanResult, check_osmgsc, measure_f,
                   param_count, scan_f, scan_measure)
from .states import (DensityOperator, NoOutcomeError, ThermalSpec, cooling_success,
                     embed_with_ancilla, measure_ancilla_ground, outcome_probability,
                     thermal_state)

__version__ = "0.1.0"
