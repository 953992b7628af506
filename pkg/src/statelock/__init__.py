"""Desk-scale engines for a measurement-free, state-locked halting protocol.

Subpackages by concern:

* :mod:`statelock.cyclic_group` -- modular functional registers and the shift.
* :mod:`statelock.protocol_engine` -- exact statevector runs of the program.
* :mod:`statelock.oscillator_analytics` -- coherent/squeezed closed forms.
* :mod:`statelock.frequency_modulation` -- trap ramps and their propagators.
* :mod:`statelock.wavepacket_sim` -- 1D double-well wave-packet dynamics.
* :mod:`statelock.control_kinematics` -- schedule arithmetic and thresholds.
* :mod:`statelock.harness` -- experiments, CSV output, validation suite.
"""

from . import (
    control_kinematics,
    cyclic_group,
    frequency_modulation,
    harness,
    oscillator_analytics,
    protocol_engine,
    wavepacket_sim,
)

__all__ = [
    "control_kinematics",
    "cyclic_group",
    "frequency_modulation",
    "harness",
    "oscillator_analytics",
    "protocol_engine",
    "wavepacket_sim",
]
__version__ = "0.1.0"
