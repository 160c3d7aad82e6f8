"""Neural-network reproductions of the low-degree bias phenomena, driven by
the degreelab model/task JSON interfaces."""

from .boolean_bias import run_boolean_bias
from .data import BooleanModel
from .extrapolation import run_extrapolation
from .models import MixedActivationMLP, MixedActivationMLPSpec
from .multitask import run_multitask_probe

__version__ = "0.1.0"
