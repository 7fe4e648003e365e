"""Success-rate-guided step-level policy optimization.

The package is a thin wrapper over the compiled extension: a deterministic
multi-turn environment, a per-task success-rate tracker, guided rollout
allocation, step-level advantage construction with replay-free local
augmentation, a tabular softmax policy with a clipped-ratio update, and the
experiment harness that ties them together.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
