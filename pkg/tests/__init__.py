# tests/__init__.py
# Makes tests a package so the repo root lands on sys.path
