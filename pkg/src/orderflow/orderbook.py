"""Limit order book with unit-size orders on a tick grid.

Prices are log-prices stored internally as integer tick levels, so tick
alignment is exact by construction.  Incoming orders are classified against
the pre-event spread: at or beyond it they execute one unit at the best
opposite quote (price-time priority), otherwise they rest at the rounded-down
level.  When a side empties, its last best quote persists as the reference
for spreads and relative prices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

_GROW = 4096


@dataclass(frozen=True)
class Order:
    id: int
    sign: int            # +1 buy, -1 sell
    log_price: float     # tick-aligned
    x_original: float    # relative price at placement
    placed_at: int


@dataclass(frozen=True)
class Trade:
    event_time: int
    price: float         # log-price of the executed resting order
    aggressor_sign: int
    phantom: bool = False  # True when the struck side held no resting order


@dataclass(frozen=True)
class Executed:
    trade: Trade


@dataclass(frozen=True)
class Rested:
    order: Order


@dataclass(frozen=True)
class Rejected:
    reason: str


class UnknownOrderError(KeyError):
    pass


class OrderBook:
    """Two price-level sides of unit-size resting orders.

    Resting-order attributes live in parallel numpy arrays (compacted with
    swap-remove) so the cancellation sweep can be vectorized; FIFO queues of
    order ids per price level preserve time priority.
    """

    def __init__(self, tick: float = 3e-4):
        if tick <= 0:
            raise ValueError("tick must be positive")
        self.tick = tick
        self.bids: dict[int, deque[int]] = {}   # level -> fifo of order ids
        self.asks: dict[int, deque[int]] = {}
        self._best_bid: int | None = None       # persists when side empties
        self._best_ask: int | None = None
        self._next_id = 0
        # registry of active orders (swap-remove compaction)
        self._n = 0
        self._ids = np.empty(_GROW, dtype=np.int64)
        self._signs = np.empty(_GROW, dtype=np.int8)
        self._levels = np.empty(_GROW, dtype=np.int64)
        self._x_orig = np.empty(_GROW, dtype=np.float64)
        self._placed = np.empty(_GROW, dtype=np.int64)
        self._slot: dict[int, int] = {}          # order id -> registry index
        self.n_buy = 0
        self.n_sell = 0

    # -- seeding ----------------------------------------------------------

    def seed(self, t: int = 0) -> None:
        """Place one buy and one sell order one tick apart around log-price
        zero (half-tick quotes rounded down to the grid)."""
        bid_level = int(np.floor(-0.5))
        ask_level = int(np.floor(0.5))
        self._insert(+1, bid_level, x_original=self.tick, t=t)
        self._insert(-1, ask_level, x_original=self.tick, t=t)

    # -- queries ----------------------------------------------------------

    def best_quotes(self) -> tuple[float | None, float | None]:
        """(best bid, best ask) as log-prices; an empty side falls back to
        the last quote it ever had, or None if never populated."""
        bid = None if self._best_bid is None else self._best_bid * self.tick
        ask = None if self._best_ask is None else self._best_ask * self.tick
        return bid, ask

    def best_levels(self) -> tuple[int | None, int | None]:
        return self._best_bid, self._best_ask

    def spread(self) -> float | None:
        bid, ask = self.best_quotes()
        if bid is None or ask is None:
            return None
        return ask - bid

    def stats(self) -> tuple[int, int, int]:
        """(n_tot, n_buy, n_sell) over resting orders."""
        return self._n, self.n_buy, self.n_sell

    @property
    def n_tot(self) -> int:
        return self._n

    def get_order(self, order_id: int) -> Order:
        try:
            i = self._slot[order_id]
        except KeyError:
            raise UnknownOrderError(order_id) from None
        return Order(
            id=order_id,
            sign=int(self._signs[i]),
            log_price=float(self._levels[i] * self.tick),
            x_original=float(self._x_orig[i]),
            placed_at=int(self._placed[i]),
        )

    def resting_view(self):
        """Zero-copy views (ids, signs, levels, x_original) of every resting
        order; valid only until the next mutation."""
        n = self._n
        return (self._ids[:n], self._signs[:n], self._levels[:n],
                self._x_orig[:n])

    def order_ids(self) -> list[int]:
        return self._ids[: self._n].tolist()

    # -- event application --------------------------------------------------

    def classify_and_apply(self, sign: int, x: float, t: int):
        """Apply one incoming order of given sign and relative price x.

        x at or beyond the pre-event spread executes one unit at the best
        opposite quote; otherwise the order rests at the rounded-down tick
        level (a sell landing at or below the best bid is clamped one tick
        above it).
        """
        if not np.isfinite(x):
            raise ValueError(f"non-finite relative price: {x!r}")
        bid_lvl, ask_lvl = self._best_bid, self._best_ask
        if bid_lvl is None or ask_lvl is None:
            return Rejected("book has no reference quotes on both sides")
        spread = (ask_lvl - bid_lvl) * self.tick
        if x >= spread:
            return self._execute(sign, t)
        if sign > 0:
            level = int(np.floor(x / self.tick + bid_lvl))
            if level >= ask_lvl:          # float-edge guard; cannot occur in reals
                level = ask_lvl - 1
        else:
            level = int(np.floor(ask_lvl - x / self.tick))
            if level <= bid_lvl:          # round-down crossed the bid: clamp
                level = bid_lvl + 1
        order = self._insert(sign, level, x_original=x, t=t)
        return Rested(order)

    def _execute(self, sign: int, t: int):
        """One unit trades at the best opposite quote; the oldest resting
        order there is removed.  If the struck side holds no resting order
        the trade happens at its remembered quote and the book is unchanged."""
        side = self.asks if sign > 0 else self.bids
        level = self._best_ask if sign > 0 else self._best_bid
        if not side:
            if level is None:
                return Rejected("market order against a side with no quote")
            return Executed(Trade(event_time=t, price=level * self.tick,
                                  aggressor_sign=sign, phantom=True))
        queue = side[level]
        oldest = queue.popleft()
        if not queue:
            del side[level]
            self._refresh_best(sign < 0)
        self._registry_remove(oldest)
        return Executed(Trade(event_time=t, price=level * self.tick,
                              aggressor_sign=sign))

    def remove_order(self, order_id: int) -> Order:
        """Remove a resting order by id (cancellation path)."""
        order = self.get_order(order_id)
        level = int(self._levels[self._slot[order_id]])
        side = self.bids if order.sign > 0 else self.asks
        queue = side[level]
        queue.remove(order_id)
        if not queue:
            del side[level]
            self._refresh_best(order.sign > 0)
        self._registry_remove(order_id)
        return order

    # -- internals ----------------------------------------------------------

    def _insert(self, sign: int, level: int, x_original: float, t: int) -> Order:
        oid = self._next_id
        self._next_id += 1
        side = self.bids if sign > 0 else self.asks
        was_empty = not side
        queue = side.get(level)
        if queue is None:
            side[level] = deque((oid,))
        else:
            queue.append(oid)
        # a fallback quote on a just-empty side is superseded by any real order
        if sign > 0:
            if was_empty or self._best_bid is None or level > self._best_bid:
                self._best_bid = level
            self.n_buy += 1
        else:
            if was_empty or self._best_ask is None or level < self._best_ask:
                self._best_ask = level
            self.n_sell += 1
        n = self._n
        if n == self._ids.size:
            self._grow()
        self._ids[n] = oid
        self._signs[n] = sign
        self._levels[n] = level
        self._x_orig[n] = x_original
        self._placed[n] = t
        self._slot[oid] = n
        self._n = n + 1
        return Order(oid, sign, level * self.tick, x_original, t)

    def _registry_remove(self, oid: int) -> None:
        i = self._slot.pop(oid)
        if self._signs[i] > 0:
            self.n_buy -= 1
        else:
            self.n_sell -= 1
        last = self._n - 1
        if i != last:
            moved = self._ids[last]
            self._ids[i] = moved
            self._signs[i] = self._signs[last]
            self._levels[i] = self._levels[last]
            self._x_orig[i] = self._x_orig[last]
            self._placed[i] = self._placed[last]
            self._slot[moved] = i
        self._n = last

    def _grow(self) -> None:
        new = self._ids.size * 2
        for name in ("_ids", "_signs", "_levels", "_x_orig", "_placed"):
            arr = getattr(self, name)
            bigger = np.empty(new, dtype=arr.dtype)
            bigger[: arr.size] = arr
            setattr(self, name, bigger)

    def _refresh_best(self, bid_side: bool) -> None:
        """Recompute a side's best after its best level emptied; an empty
        side keeps its previous best as the fallback reference."""
        if bid_side:
            if self.bids:
                self._best_bid = max(self.bids)
        else:
            if self.asks:
                self._best_ask = min(self.asks)

    def check_invariants(self) -> None:
        """Assert structural invariants (test/fuzz helper)."""
        if self.bids and self.asks:
            assert max(self.bids) < min(self.asks), "book is crossed"
        n_queued = sum(len(q) for q in self.bids.values())
        n_queued += sum(len(q) for q in self.asks.values())
        assert n_queued == self._n, "registry/queue count mismatch"
        assert self.n_buy + self.n_sell == self._n, "side counts mismatch"
        signs = self._signs[: self._n]
        assert (signs > 0).sum() == self.n_buy, "buy count mismatch"
        if self.bids:
            assert self._best_bid == max(self.bids)
        if self.asks:
            assert self._best_ask == min(self.asks)
