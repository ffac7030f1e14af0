"""Bruce-Roberts numbers of holomorphic 1-forms on ICIS germs, computed exactly."""

__version__ = "0.1.0"

from .polyring import Polynomial, PolyMatrix, parse_polynomial  # noqa: E402
from .invariants import ICISGerm, OneForm, check_identities, validate_icis  # noqa: E402

__all__ = ["Polynomial", "PolyMatrix", "parse_polynomial", "ICISGerm", "OneForm", "check_identities", "validate_icis"]
