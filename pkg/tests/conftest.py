import os

# Allow the worker-count determinism tests to request more threads than
# this machine has cores; must be set before numba is first imported.
os.environ.setdefault("NUMBA_NUM_THREADS", "16")
