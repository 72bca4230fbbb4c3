"""Polyglot synthesis over a simulated XSS injection-context testbed."""

from .tokens import CatalogError, CompositionRule, Token, TokenCatalog, TokenKind, legal_moves, load_catalog, render
from .testbed import (
    Channel,
    ContextError,
    EvalOutcome,
    InjectionContext,
    Reason,
    ScoreVector,
    Testbed,
    evaluate,
    evaluate_context,
    load_contexts,
    mutually_exclusive,
)
from .defaults import default_catalog, default_contexts, reduced_catalog

__version__ = "0.1.0"
