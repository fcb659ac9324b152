"""Tunneling of a slow excited atom through a vacuum cavity mode holding N-1 ground-state atoms."""

from mazer.model import (
    CouplingMatrix,
    DressedEigensystem,
    SystemParams,
    bare_state_decomposition,
    coupling_matrix,
    dressed_eigensystem,
)
from mazer.oracle import OracleConfig, SingularMatchingError, convergence_study, solve_coupled_channels
from mazer.scattering import (
    ChannelAmplitudes,
    ChannelProbabilities,
    MesaAmplitudes,
    channel_amplitudes,
    channel_amplitudes_grid,
    channel_probabilities,
    fast_limit_probabilities,
    mesa_amplitudes,
    slow_limit_transmission,
    transmission_extrema,
)
from mazer.sweep import SweepRecord, SweepSpec, figure, run_sweep
from mazer.wavepacket import PacketSpec, averaged_probabilities

__version__ = "0.1.0"
