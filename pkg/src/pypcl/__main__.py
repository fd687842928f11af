# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""Entry point of ``python -m pypcl``."""

import sys

from .cli import main

sys.exit(main())
