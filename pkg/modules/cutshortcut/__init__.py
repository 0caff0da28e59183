"""Cut-shortcut pattern policy: cut sets, container model and solver hooks."""

from modules.cutshortcut.container_model import ContainerModel, load_container_model
from modules.cutshortcut.cuts import CutSets, compute_cuts, param_return_flow
from modules.cutshortcut.policy import CutShortcutPolicy, csc_policy

__all__ = [
    "ContainerModel",
    "load_container_model",
    "CutSets",
    "compute_cuts",
    "param_return_flow",
    "CutShortcutPolicy",
    "csc_policy",
]
