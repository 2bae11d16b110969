# Copyright 2026 The binharm Authors
# SPDX-License-Identifier: Apache-2.0
"""Python bindings for the binharm auditory model.

Signals are numpy arrays: mono as shape (n,), stereo as shape (2, n).
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
