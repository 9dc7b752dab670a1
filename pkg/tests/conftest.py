"""Pin BLAS to one thread before numpy loads, so acceptance timings are
honest single-threaded measurements."""

import os

for var in ("OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "OMP_NUM_THREADS",
            "NUMEXPR_NUM_THREADS"):
    os.environ.setdefault(var, "1")
