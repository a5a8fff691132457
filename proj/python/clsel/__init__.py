"""Composite likelihood selection by Gibbs sampling.

Thin Python layer over the C++ core: model simulators, the cls1/cls2
selection algorithms and the analytic oracles used to validate them.
"""

try:
    from ._clsel import (  # type: ignore[attr-defined]
        NumericalError,
        ParameterError,
        __version__,
        conditional_probability,
        g0_common_location,
        g0_optimal_structure,
        hamming_distance,
        pcer_threshold,
        select,
        simulate_common_location,
        simulate_exchangeable,
        simulate_ordinal,
    )
except ImportError:  # pragma: no cover - in-tree builds keep the module flat
    from _clsel import (  # type: ignore[no-redef]
        NumericalError,
        ParameterError,
        __version__,
        conditional_probability,
        g0_common_location,
        g0_optimal_structure,
        hamming_distance,
        pcer_threshold,
        select,
        simulate_common_location,
        simulate_exchangeable,
        simulate_ordinal,
    )

__all__ = [
    "NumericalError",
    "ParameterError",
    "__version__",
    "conditional_probability",
    "g0_common_location",
    "g0_optimal_structure",
    "hamming_distance",
    "pcer_threshold",
    "select",
    "simulate_common_location",
    "simulate_exchangeable",
    "simulate_ordinal",
]
