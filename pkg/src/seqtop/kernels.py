"""Kernel selection: compiled extension when importable, pure Python otherwise.

Set ``SEQTOP_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

BACKEND = "python"

if os.environ.get("SEQTOP_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._ckernels import (  # type: ignore[import-not-found]
            asep_holds,
            derived_closed_sets,
            enumerate_min_nbhds,
            filter_finer_separating,
            min_nbhds_from_opens,
            min_nbhds_from_subbasis,
            opens_from_min_nbhds,
        )

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        pass

if BACKEND == "python":
    from ._pykernels import (  # noqa: F401
        asep_holds,
        derived_closed_sets,
        enumerate_min_nbhds,
        filter_finer_separating,
        min_nbhds_from_opens,
        min_nbhds_from_subbasis,
        opens_from_min_nbhds,
    )

__all__ = [
    "BACKEND",
    "asep_holds",
    "derived_closed_sets",
    "enumerate_min_nbhds",
    "filter_finer_separating",
    "min_nbhds_from_opens",
    "min_nbhds_from_subbasis",
    "opens_from_min_nbhds",
]
