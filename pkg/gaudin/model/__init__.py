# gaudin/model/__init__.py
