from __future__ import annotations

from pathlib import Path

HOME_DIR = Path.home()
APP_DIR = HOME_DIR / ".schubert_tables"
CONFIG_FILE = APP_DIR / "settings.json"
LOG_DIR = APP_DIR / "logs"

PACKAGE_DIR = Path(__file__).resolve().parent
DATA_DIR = PACKAGE_DIR / "data"

ENV_PREFIX = "SCHUBERT_TABLES_"
SCHEMA_VERSION = 1

# Konventionen, festgelegt durch den Bootstrap gegen A_2..A_5 von F4:C3.
# "left-to-right": [2, 1] bedeutet s_2 * s_1.
WORD_ORDER = "left-to-right"
# "right": Nebenklassen w W_H, minimal heißt l(w s_i) > l(w) für alle parabolischen i.
COSET_SIDE = "right"
# True: C[i][j] = <alpha_i, alpha_j^vee>, also s_i(alpha_j) = alpha_j - C[j][i] alpha_i.
CARTAN_ROW_IS_ROOT = True

CASE_FILES = {
    "F4:C3": "f4_c3.json",
    "F4:B3": "f4_b3.json",
    "E6:A6": "e6_a6.json",
    "E6:D5": "e6_d5.json",
    "E7:E6": "e7_e6.json",
    "E7:D6": "e7_d6.json",
    "E8:E7": "e8_e7.json",
}
CASE_IDS = tuple(CASE_FILES)

# Strukturmatrizen, die nur mit --extended berechnet werden
EXTENDED_DEGREES = {"E8:E7": (24, 30)}

ORIENTATIONS = ("classes_by_monomials", "monomials_by_classes")
OUTPUT_FORMATS = ("text", "structured")
LOCALIZATION_MODES = ("point", "symbolic")

ROOT_CLOSURE_CAP = 20_000
BOREL_SIZE_CAP = 5_000
DEFAULT_CACHE_SIZE = 4096
