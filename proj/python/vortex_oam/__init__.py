"""OAM transfer from electron Bessel vortex beams to off-axis atomic transitions."""

from ._core import (
    AtomicState,
    DichroismEngines,
    DipoleTransition,
    DirectEngine,
    DomainError,
    ExpansionEngine,
    NumericalError,
    ValidationError,
    __version__,
    azimuthal_selection,
    beam_direct,
    beam_reconstruct,
    bessel_j,
    config_hash,
    default_transition,
    enumerate_channels,
    kernel_fourier,
    parse_config,
    run,
    verify,
)

__all__ = [
    "AtomicState",
    "DichroismEngines",
    "DipoleTransition",
    "DirectEngine",
    "DomainError",
    "ExpansionEngine",
    "NumericalError",
    "ValidationError",
    "__version__",
    "azimuthal_selection",
    "beam_direct",
    "beam_reconstruct",
    "bessel_j",
    "config_hash",
    "default_transition",
    "enumerate_channels",
    "kernel_fourier",
    "parse_config",
    "run",
    "verify",
]
