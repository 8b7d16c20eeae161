"""Price-first continuous double auction clearing.

Buy orders are indivisible (all-or-nothing), sell orders divisible.
Buyers are processed in descending price order and filled from the
cheapest price-compatible sellers, if and only if those sellers'
combined remaining quantity covers the full buy quantity. Transactions
price at the seller's ask, which minimizes the spend of each filled
buyer. Ties break on trader id so results are independent of input
order. Quantities are integer watts committed for one market round.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Side(enum.Enum):
    BUY = "buy"
    SELL = "sell"


@dataclass(frozen=True)
class Order:
    trader: int
    side: Side
    quantity: int          # W, committed for the coming round
    price: float           # $/kWh
    responsive: bool = True

    def __post_init__(self):
        if self.quantity <= 0:
            raise ValueError("order quantity must be positive")
        if self.price < 0:
            raise ValueError("order price must be non-negative")


@dataclass(frozen=True)
class Transaction:
    buyer: int
    seller: int
    quantity: int          # W
    price: float           # $/kWh, always the seller's ask
    round_index: int = 0


@dataclass
class MarketResult:
    transactions: list[Transaction] = field(default_factory=list)
    bought: dict[int, int] = field(default_factory=dict)
    sold: dict[int, int] = field(default_factory=dict)

    @property
    def round_vwap(self) -> float | None:
        return vwap(self.transactions)


def match_orders(orders: list[Order], round_index: int = 0) -> MarketResult:
    """Clear one round of the double auction.

    Buyers descend by price (ties: lower trader id first). For each
    buyer, sellers with ask <= bid are taken cheapest-first (ties: lower
    trader id); the buyer fills only if their combined remaining
    quantity covers it in full. Partial seller fills persist across
    buyers; unfillable buyers are dropped.
    """
    buyers = sorted((o for o in orders if o.side is Side.BUY),
                    key=lambda o: (-o.price, o.trader))
    sellers = sorted((o for o in orders if o.side is Side.SELL),
                     key=lambda o: (o.price, o.trader))
    remaining = [s.quantity for s in sellers]
    result = MarketResult()
    for buyer in buyers:
        eligible = [i for i, s in enumerate(sellers)
                    if remaining[i] > 0 and s.price <= buyer.price]
        if sum(remaining[i] for i in eligible) < buyer.quantity:
            continue
        need = buyer.quantity
        for i in eligible:
            if need == 0:
                break
            q = min(remaining[i], need)
            remaining[i] -= q
            need -= q
            result.transactions.append(Transaction(
                buyer.trader, sellers[i].trader, q, sellers[i].price,
                round_index))
        result.bought[buyer.trader] = (
            result.bought.get(buyer.trader, 0) + buyer.quantity)
    for i, s in enumerate(sellers):
        filled = s.quantity - remaining[i]
        if filled > 0:
            result.sold[s.trader] = result.sold.get(s.trader, 0) + filled
    return result


def vwap(transactions) -> float | None:
    """Volume-weighted average price; None marks a no-trade window."""
    total_q = sum(tx.quantity for tx in transactions)
    if total_q == 0:
        return None
    return sum(tx.quantity * tx.price for tx in transactions) / total_q
