"""Qudit stabiliser states over prime dimensions: algebra, learners and testers."""

from .gf import FieldSpec, Subspace, enumerate_lagrangians, find_zero_sum_of_three_squares
from .weyl import PauliElement, pauli_mul, weyl_matrix
from .state import RngStream, StateVector, basis_state, haar_random
from .fourier import PhaseDistribution, characteristic_distribution, weyl_distribution
from .stab import StabilizerGroup, new_group, random_group, state_closed_form
from .learn import CopyOracle, LearnResult, algorithm1, algorithm2, validate_recovery
from .distinguish import acceptance_probability, algorithm3

__version__ = "0.1.0"
