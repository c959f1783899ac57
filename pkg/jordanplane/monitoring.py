from prometheus_client import CollectorRegistry, Counter, Histogram, generate_latest

# Private registry: the engine is a library and must not pollute the default one
registry = CollectorRegistry(auto_describe=True)

SYMMETRIZER_BUILDS = Counter(
    "jordanplane_symmetrizer_builds",
    "Quantum symmetrizer matrices built",
    ["method"],
    registry=registry,
)
SYMMETRIZER_SECONDS = Histogram(
    "jordanplane_symmetrizer_seconds",
    "Wall time spent building symmetrizer matrices",
    registry=registry,
)
RANK_COMPUTATIONS = Counter(
    "jordanplane_rank_computations",
    "Exact eliminations performed",
    ["kind"],
    registry=registry,
)
REWRITE_REDUCTIONS = Counter(
    "jordanplane_rewrite_reductions",
    "Single rewrite steps applied",
    registry=registry,
)
COMPLETION_RULES_ADDED = Counter(
    "jordanplane_completion_rules_added",
    "Rules added by completion beyond the input relations",
    registry=registry,
)


def render_metrics() -> str:
    """Text exposition of every engine metric."""
    return generate_latest(registry).decode("utf-8")
