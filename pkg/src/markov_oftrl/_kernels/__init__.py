"""Kernel backend selection: compiled extension when built, numpy fallback otherwise."""

from markov_oftrl._kernels import _py as pure

try:  # pragma: no cover - exercised only when the extension is built
    from markov_oftrl._kernels import _speedups as _impl

    BACKEND = "compiled"
except ImportError:  # extension not built on this platform
    _impl = pure
    BACKEND = "python"

logbarrier_batch = _impl.logbarrier_batch
hedge_batch = _impl.hedge_batch


def available_backends() -> dict:
    """Name -> module for every importable backend (for parity tests / benchmarks)."""
    out = {"python": pure}
    if BACKEND == "compiled":
        out["compiled"] = _impl
    return out
