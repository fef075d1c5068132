#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
import sys

from .cli import main

sys.exit(main())
