"""Deciding binary message content received over relay paths with tampering relays."""
from .cutset import CutProfile, LikelihoodPair, conditional_likelihoods, cut_profile
from .decision import RULES, CostMatrix, Verdict, apply_rule
from .errors import TopoDecideError
from .netsim import ScenarioConfig
from .topology import MessageCopy, PathSystem, build_path_system, partition

__all__ = [
    "CostMatrix", "CutProfile", "LikelihoodPair", "MessageCopy", "PathSystem", "RULES",
    "ScenarioConfig", "TopoDecideError", "Verdict", "apply_rule", "build_path_system",
    "conditional_likelihoods", "cut_profile", "partition",
]
