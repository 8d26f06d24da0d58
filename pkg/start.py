# -*- coding: utf-8 -*-
"""
ReLOAD Bench - 启动程序
用法: python start.py cmdp --env paradox --solver reload-mdpi --oracle --out exports/paradox
"""
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from ui_layer import main

if __name__ == '__main__':
    sys.exit(main())
