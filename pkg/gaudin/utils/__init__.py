# gaudin/utils/__init__.py
