"""Target construction, graph assembly and rewiring."""
from .construct import ConstructionError, StubGraph, construct_graph
from .pipeline import RestoreConfig, RestoreResult, gjoka_generate, restore, restore_from
from .rewire import RewireReport, clustering_distance, rewire, rewire_stubs, stubs_from_graph
from .targets import (TargetDegreeVector, TargetJDM, adjust_degree_vector, adjust_jdm,
                      degree_classes, init_degree_vector, init_jdm, modify_degree_vector,
                      modify_jdm, near_int, subgraph_jdm)

__all__ = [
    "ConstructionError", "StubGraph", "construct_graph", "RestoreConfig", "RestoreResult",
    "gjoka_generate", "restore", "restore_from", "RewireReport", "clustering_distance", "rewire",
    "rewire_stubs", "stubs_from_graph", "TargetDegreeVector", "TargetJDM", "adjust_degree_vector",
    "adjust_jdm", "degree_classes", "init_degree_vector", "init_jdm", "modify_degree_vector",
    "modify_jdm", "near_int", "subgraph_jdm",
]
