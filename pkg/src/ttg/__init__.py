"""ttg — symbolic travel planning toolkit.

Generates symbolic travel requests with matching flight/hotel inventories,
compiles them into a time-discretized MILP, solves it exactly with a
built-in branch-and-bound solver, and scores translator outputs with
exact-match and quality-ratio metrics.
"""

__version__ = "0.1.0"

from .schema import (  # noqa: F401
    AirlineConstraints,
    BudgetConstraints,
    ConstraintReport,
    FlightOffer,
    HotelConstraints,
    HotelOffer,
    HotelStay,
    Inventory,
    Itinerary,
    MalformedJson,
    SchemaViolation,
    Segment,
    TimeWindow,
    TravelRequest,
    UnknownOffer,
    canonicalize,
    check_feasibility,
    parse_inventory,
    parse_itinerary,
    parse_request,
    serialize_inventory,
    serialize_itinerary,
    serialize_request,
)
