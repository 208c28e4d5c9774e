# gaudin/algebra/__init__.py
