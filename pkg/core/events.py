"""Centralized analysis name constants.

This module defines the identifiers for pointer-flow-graph edge kinds,
cut-shortcut patterns and container element categories. Using constants
avoids typos when building edges or matching model rows.
"""

# PFG edge kinds
EDGE_ASSIGN = "assign"
EDGE_STORE = "store"
EDGE_LOAD = "load"
EDGE_PARAM = "param"
EDGE_RETURN = "return"
EDGE_SHORTCUT = "shortcut"

ALL_EDGE_KINDS = {
    EDGE_ASSIGN,
    EDGE_STORE,
    EDGE_LOAD,
    EDGE_PARAM,
    EDGE_RETURN,
    EDGE_SHORTCUT,
}

# Patterns selectable on the command line
PATTERN_FIELD = "field"
PATTERN_CONTAINER = "container"
PATTERN_LOCAL = "local"
# The field pattern splits into its store and load halves
PATTERN_FIELD_STORE = "field-store"
PATTERN_FIELD_LOAD = "field-load"

ALL_PATTERNS = {PATTERN_FIELD, PATTERN_CONTAINER, PATTERN_LOCAL}

# Tags attached to cut return variables
TAG_FIELD_LOAD = "fieldLoad"
TAG_CONTAINER = "container"
TAG_LOCAL_FLOW = "localFlow"

# Rule names recorded in the cut log
RULE_CUT_STORE = "cutStore"

# Container element categories
COL_VALUE = "COL_VALUE"
MAP_KEY = "MAP_KEY"
MAP_VALUE = "MAP_VALUE"

ALL_CATEGORIES = {COL_VALUE, MAP_KEY, MAP_VALUE}

# Analysis flavors
ANALYSIS_CI = "ci"
ANALYSIS_CSC = "csc"
ANALYSIS_KCFA = "kcfa"
ANALYSIS_KOBJ = "kobj"

# Client metric names, in report order
METRIC_NAMES = ("failCast", "reachMtd", "polyCall", "callEdge")

__all__ = [
    "EDGE_ASSIGN",
    "EDGE_STORE",
    "EDGE_LOAD",
    "EDGE_PARAM",
    "EDGE_RETURN",
    "EDGE_SHORTCUT",
    "ALL_EDGE_KINDS",
    "PATTERN_FIELD",
    "PATTERN_CONTAINER",
    "PATTERN_LOCAL",
    "PATTERN_FIELD_STORE",
    "PATTERN_FIELD_LOAD",
    "ALL_PATTERNS",
    "TAG_FIELD_LOAD",
    "TAG_CONTAINER",
    "TAG_LOCAL_FLOW",
    "RULE_CUT_STORE",
    "COL_VALUE",
    "MAP_KEY",
    "MAP_VALUE",
    "ALL_CATEGORIES",
    "ANALYSIS_CI",
    "ANALYSIS_CSC",
    "ANALYSIS_KCFA",
    "ANALYSIS_KOBJ",
    "METRIC_NAMES",
]
