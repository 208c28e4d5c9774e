# gaudin/core/__init__.py
