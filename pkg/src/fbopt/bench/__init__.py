from .profiles import (METRICS, EmptyProfileError, ProfileCurve,
                       performance_profile, performance_ratios, profiles_to_csv,
                       write_profiles_csv)
from .records import (CSV_FIELDS, CSV_HEADER, RunRecord, read_records_csv,
                      records_to_csv, write_records_csv, write_records_json)
from .runner import (BenchProblem, MpcRunConfig, RunConfig, run_matrix,
                     run_mpc_closed_loop, run_single, shift_warm_start)

__all__ = [
    "BenchProblem", "CSV_FIELDS", "CSV_HEADER", "EmptyProfileError", "METRICS",
    "MpcRunConfig", "ProfileCurve", "RunConfig", "RunRecord",
    "performance_profile", "performance_ratios", "profiles_to_csv",
    "read_records_csv", "records_to_csv", "run_matrix", "run_mpc_closed_loop",
    "run_single", "shift_warm_start", "write_profiles_csv", "write_records_csv",
    "write_records_json",
]
