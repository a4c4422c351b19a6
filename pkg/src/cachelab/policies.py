"""Baseline replacement policies and the policy name registry.

Families:
  recency   LRU, LIP, BIP, DIP (insertion-position variants over a true
            recency stack; DIP set-duels LRU against BIP)
  nru       k-bit Not-Recently-Used classes with aging
  rrip      SRRIP, BRRIP, DRRIP over m-bit re-reference prediction values
  ship-mem  RRIP with memory-region reuse counters trained on sampler sets
  pin       reserves ways for high-reuse-hinted blocks over a base policy
  random    uniform random victim

NRU breaks victim ties with a uniform draw from the run's seeded
generator; the RRIP family uses the lowest way index so its victim
choice is fully deterministic.
"""

from collections import OrderedDict

from cachelab.engine import Policy, SplitMix64
from cachelab.trace import ReuseHint

BIP_EPSILON = 1.0 / 32.0
LEADER_SETS = 32
PSEL_BITS = 10


class SetDuel:
    """Two-constituency set dueling with a saturating selector.

    Leader sets are strided across the cache and always run their own
    constituency's policy; a miss in a leader set votes against that
    constituency.  Followers run the current winner.  A single-set
    cache has no room for disjoint leaders, so `shadow` is set and the
    owning policy duels with shadow tag directories instead.
    """

    def __init__(self, num_sets, leaders=LEADER_SETS, psel_bits=PSEL_BITS):
        self.psel_max = (1 << psel_bits) - 1
        self.mid = 1 << (psel_bits - 1)
        self.psel = self.mid - 1
        self.kind = {}
        n = min(leaders, num_sets // 2)
        self.shadow = n < 1
        if n >= 1:
            stride = num_sets // (2 * n)
            for i in range(n):
                self.kind[2 * i * stride] = "a"
                self.kind[(2 * i + 1) * stride] = "b"

    def constituency(self, set_index):
        return self.kind.get(set_index)

    def vote_against_a(self):
        if self.psel < self.psel_max:
            self.psel += 1

    def vote_against_b(self):
        if self.psel > 0:
            self.psel -= 1

    def record_leader_miss(self, set_index):
        k = self.kind.get(set_index)
        if k == "a":
            self.vote_against_a()
        elif k == "b":
            self.vote_against_b()

    def winner(self):
        return "b" if self.psel >= self.mid else "a"

    def governing(self, set_index):
        return self.kind.get(set_index) or self.winner()


class _ShadowLru:
    """Tag-only LRU directory used for shadow dueling."""

    def __init__(self, ways):
        self.ways = ways
        self.tags = OrderedDict()

    def access(self, tag):
        if tag in self.tags:
            self.tags.move_to_end(tag)
            return True
        self.tags[tag] = True
        if len(self.tags) > self.ways:
            self.tags.popitem(last=False)
        return False


class _ShadowBip:
    """Tag-only directory under bimodal insertion (MRU with prob epsilon)."""

    def __init__(self, ways, epsilon, rng):
        self.ways = ways
        self.epsilon = epsilon
        self.rng = rng
        self.order = []  # index 0 = MRU

    def access(self, tag):
        if tag in self.order:
            self.order.remove(tag)
            self.order.insert(0, tag)
            return True
        if len(self.order) >= self.ways:
            self.order.pop()
        if self.rng.random() < self.epsilon:
            self.order.insert(0, tag)
        else:
            self.order.append(tag)
        return False


class _ShadowRrip:
    """Tag-only m-bit RRIP directory; brrip_epsilon None means static insertion."""

    def __init__(self, ways, rrpv_max, brrip_epsilon, rng):
        self.ways = ways
        self.rrpv_max = rrpv_max
        self.brrip_epsilon = brrip_epsilon
        self.rng = rng
        self.tags = []
        self.rrpv = []

    def access(self, tag):
        if tag in self.tags:
            self.rrpv[self.tags.index(tag)] = 0
            return True
        if len(self.tags) >= self.ways:
            while True:
                victim = next(
                    (i for i, r in enumerate(self.rrpv) if r == self.rrpv_max), None
                )
                if victim is not None:
                    break
                self.rrpv = [r + 1 for r in self.rrpv]
            self.tags.pop(victim)
            self.rrpv.pop(victim)
        if self.brrip_epsilon is None:
            rrpv = self.rrpv_max - 1
        else:
            rrpv = self.rrpv_max - 1 if self.rng.random() < self.brrip_epsilon else self.rrpv_max
        self.tags.append(tag)
        self.rrpv.append(rrpv)
        return False


def _fork_rng(rng):
    # decouple shadow-directory draws from the main decision stream
    return SplitMix64(rng.next_u64() ^ 0x9E3779B97F4A7C15)


class RecencyPolicy(Policy):
    """Common machinery for the LRU stack family; slot.state = recency
    position, 0 meaning most recently used."""

    def _normalize_insert(self, view, way, at_mru):
        slots = view.slots
        new = slots[way]
        others = sorted(
            (s.state, i) for i, s in enumerate(slots) if s.valid and s is not new
        )
        if at_mru:
            new.state = 0
            for rank, (_, i) in enumerate(others):
                slots[i].state = rank + 1
        else:
            for rank, (_, i) in enumerate(others):
                slots[i].state = rank
            new.state = len(others)

    def _promote(self, view, way):
        slots = view.slots
        pos = slots[way].state
        for s in slots:
            if s.valid and s.state < pos:
                s.state += 1
        slots[way].state = 0

    def _deepest(self, view, among=None):
        slots = view.slots
        ways = among if among is not None else range(view.ways)
        best = None
        best_pos = -1
        for w in ways:
            s = slots[w]
            if s.valid and s.state > best_pos:
                best_pos = s.state
                best = w
        return best

    def on_hit(self, view, way, access):
        self._promote(view, way)

    def choose_victim(self, view, access):
        return self._deepest(view)

    def choose_victim_among(self, view, ways_subset, access):
        return self._deepest(view, ways_subset)


class LruPolicy(RecencyPolicy):
    name = "lru"

    def on_insert(self, view, way, access):
        self._normalize_insert(view, way, at_mru=True)


class LipPolicy(RecencyPolicy):
    """LRU Insertion Policy: new blocks start at the bottom of the stack."""

    name = "lip"

    def on_insert(self, view, way, access):
        self._normalize_insert(view, way, at_mru=False)


class BipPolicy(RecencyPolicy):
    """Bimodal insertion: MRU with probability epsilon, else bottom."""

    name = "bip"

    def __init__(self, epsilon=BIP_EPSILON):
        self.epsilon = epsilon

    def on_insert(self, view, way, access):
        self._normalize_insert(view, way, at_mru=self.rng.random() < self.epsilon)


class DipPolicy(RecencyPolicy):
    """Dynamic Insertion Policy: set-duels LRU (a) against BIP (b)."""

    name = "dip"

    def __init__(self, epsilon=BIP_EPSILON, leaders=LEADER_SETS, psel_bits=PSEL_BITS):
        self.epsilon = epsilon
        self.leaders = leaders
        self.psel_bits = psel_bits

    def reset(self, geometry, rng):
        super().reset(geometry, rng)
        self.duel = SetDuel(geometry.num_sets, self.leaders, self.psel_bits)
        self._shadow_a = self._shadow_b = None
        if self.duel.shadow:
            shadow_rng = _fork_rng(rng)
            self._shadow_a = [_ShadowLru(geometry.ways) for _ in range(geometry.num_sets)]
            self._shadow_b = [
                _ShadowBip(geometry.ways, self.epsilon, shadow_rng)
                for _ in range(geometry.num_sets)
            ]

    def _shadow_access(self, view, access):
        si = view.set_index
        tag = self.geometry.tag(access.address)
        if not self._shadow_a[si].access(tag):
            self.duel.vote_against_a()
        if not self._shadow_b[si].access(tag):
            self.duel.vote_against_b()

    def on_hit(self, view, way, access):
        if self.duel.shadow:
            self._shadow_access(view, access)
        self._promote(view, way)

    def decide_insert(self, view, access):
        if self.duel.shadow:
            self._shadow_access(view, access)
        else:
            self.duel.record_leader_miss(view.set_index)
        return True

    def on_insert(self, view, way, access):
        if self.duel.governing(view.set_index) == "a":
            at_mru = True
        else:
            at_mru = self.rng.random() < self.epsilon
        self._normalize_insert(view, way, at_mru=at_mru)


class RandomPolicy(Policy):
    name = "random"

    def choose_victim(self, view, access):
        return self.rng.randrange(view.ways)


class NruPolicy(Policy):
    """k-bit NRU: insert and promote to class 0, evict a random member
    of the maximum class, aging every block until one reaches it."""

    def __init__(self, bits=1):
        if bits < 1:
            raise ValueError("nru needs at least 1 bit")
        self.bits = bits
        self.class_max = (1 << bits) - 1
        self.name = "nru%d" % bits

    def on_insert(self, view, way, access):
        view.slots[way].state = 0

    def on_hit(self, view, way, access):
        view.slots[way].state = 0

    def choose_victim(self, view, access):
        slots = view.slots
        while True:
            at_max = [w for w, s in enumerate(slots) if s.valid and s.state == self.class_max]
            if at_max:
                return at_max[0] if len(at_max) == 1 else self.rng.choice(at_max)
            for s in slots:
                if s.valid:
                    s.state += 1


def rrip_victim(slots, ways_subset, rrpv_max):
    """Shared RRPV victim scan: evict at rrpv_max, aging until one appears.

    Ways outside ways_subset (e.g. pinned blocks) are neither candidates
    nor aged.  Ties go to the lowest way index.
    """
    while True:
        for w in ways_subset:
            if slots[w].state == rrpv_max:
                return w
        for w in ways_subset:
            slots[w].state += 1


class SrripPolicy(Policy):
    """Static RRIP: insert at long re-reference interval, promote to 0."""

    def __init__(self, m=2):
        if m < 1:
            raise ValueError("rrip needs at least 1 bit")
        self.m = m
        self.rrpv_max = (1 << m) - 1
        self.name = "srrip%d" % m

    def on_insert(self, view, way, access):
        view.slots[way].state = self.rrpv_max - 1

    def on_hit(self, view, way, access):
        view.slots[way].state = 0

    def choose_victim(self, view, access):
        return rrip_victim(view.slots, range(view.ways), self.rrpv_max)

    def choose_victim_among(self, view, ways_subset, access):
        return rrip_victim(view.slots, ways_subset, self.rrpv_max)


class BrripPolicy(SrripPolicy):
    """Bimodal RRIP: insert at rrpv_max except with probability epsilon."""

    def __init__(self, m=2, epsilon=BIP_EPSILON):
        super().__init__(m)
        self.epsilon = epsilon
        self.name = "brrip%d" % m

    def _bimodal_rrpv(self):
        if self.rng.random() < self.epsilon:
            return self.rrpv_max - 1
        return self.rrpv_max

    def on_insert(self, view, way, access):
        view.slots[way].state = self._bimodal_rrpv()


class DrripPolicy(BrripPolicy):
    """Dynamic RRIP: set-duels SRRIP insertion (a) against BRRIP (b)."""

    def __init__(self, m=2, epsilon=BIP_EPSILON, leaders=LEADER_SETS, psel_bits=PSEL_BITS):
        super().__init__(m, epsilon)
        self.leaders = leaders
        self.psel_bits = psel_bits
        self.name = "drrip%d" % m

    def reset(self, geometry, rng):
        super().reset(geometry, rng)
        self.duel = SetDuel(geometry.num_sets, self.leaders, self.psel_bits)
        self._shadow_a = self._shadow_b = None
        if self.duel.shadow:
            shadow_rng = _fork_rng(rng)
            self._shadow_a = [
                _ShadowRrip(geometry.ways, self.rrpv_max, None, shadow_rng)
                for _ in range(geometry.num_sets)
            ]
            self._shadow_b = [
                _ShadowRrip(geometry.ways, self.rrpv_max, self.epsilon, shadow_rng)
                for _ in range(geometry.num_sets)
            ]

    def _shadow_access(self, view, access):
        si = view.set_index
        tag = self.geometry.tag(access.address)
        if not self._shadow_a[si].access(tag):
            self.duel.vote_against_a()
        if not self._shadow_b[si].access(tag):
            self.duel.vote_against_b()

    def on_hit(self, view, way, access):
        if self.duel.shadow:
            self._shadow_access(view, access)
        view.slots[way].state = 0

    def decide_insert(self, view, access):
        if self.duel.shadow:
            self._shadow_access(view, access)
        else:
            self.duel.record_leader_miss(view.set_index)
        return True

    def on_insert(self, view, way, access):
        if self.duel.governing(view.set_index) == "a":
            view.slots[way].state = self.rrpv_max - 1
        else:
            view.slots[way].state = self._bimodal_rrpv()


class ShipMemPolicy(SrripPolicy):
    """RRIP steered by per-memory-region reuse counters (SHiP-MEM).

    Addresses map to fixed-size regions; each region has a saturating
    counter trained by sampler sets: a sampler hit sets the block's
    outcome bit and increments the region counter, evicting a sampler
    block that was never re-referenced decrements it.  Blocks from
    regions whose counter has decayed to zero are inserted at the
    distant re-reference point, everything else one step closer.
    """

    def __init__(self, m=3, region_bytes=16384, counter_bits=3, sampler_sets=64):
        super().__init__(m)
        self.name = "ship-mem"
        self.region_bytes = region_bytes
        self.counter_max = (1 << counter_bits) - 1
        self.counter_init = 1
        self.sampler_sets = sampler_sets

    def reset(self, geometry, rng):
        super().reset(geometry, rng)
        n = min(self.sampler_sets, geometry.num_sets)
        stride = max(1, geometry.num_sets // n)
        self.sampler = set(i * stride for i in range(n))
        self.table = {}
        self.meta = {}  # (set, way) -> [outcome, region], sampler blocks only

    def _region(self, access):
        return access.address // self.region_bytes

    def on_insert(self, view, way, access):
        region = self._region(access)
        counter = self.table.get(region, self.counter_init)
        if counter == 0:
            view.slots[way].state = self.rrpv_max
        else:
            view.slots[way].state = self.rrpv_max - 1
        if view.set_index in self.sampler:
            self.meta[(view.set_index, way)] = [0, region]

    def on_hit(self, view, way, access):
        view.slots[way].state = 0
        if view.set_index in self.sampler:
            entry = self.meta.get((view.set_index, way))
            if entry is not None:
                entry[0] = 1
            region = self._region(access)
            counter = self.table.get(region, self.counter_init)
            if counter < self.counter_max:
                self.table[region] = counter + 1

    def choose_victim(self, view, access):
        way = rrip_victim(view.slots, range(view.ways), self.rrpv_max)
        if view.set_index in self.sampler:
            entry = self.meta.pop((view.set_index, way), None)
            if entry is not None and entry[0] == 0:
                counter = self.table.get(entry[1], self.counter_init)
                if counter > 0:
                    self.table[entry[1]] = counter - 1
        return way


class PinPolicy(Policy):
    """Reserve a share of each set's ways for High-Reuse-hinted blocks.

    Pinned blocks are never victim candidates.  When every way of a set
    is pinned, further insertions are bypassed.  Unhinted traffic is
    managed by the base policy on the unpinned ways.
    """

    bypasses = True

    def __init__(self, percent, base=None):
        if not 0 <= percent <= 100:
            raise ValueError("pin percentage must be 0..100")
        self.percent = percent
        self.base = base if base is not None else DrripPolicy(m=3)
        self.name = "pin%d" % percent
        self._pin_next = False

    def reset(self, geometry, rng):
        super().reset(geometry, rng)
        self.base.reset(geometry, rng)
        self.reserved = round(geometry.ways * self.percent / 100.0)

    def _pinned_count(self, view):
        return sum(1 for s in view.slots if s.valid and s.pinned)

    def decide_insert(self, view, access):
        self._pin_next = False
        self.base.decide_insert(view, access)  # keep base dueling trained
        hint = access.reuse_hint if access.hint_valid else ReuseHint.DEFAULT
        pinned = self._pinned_count(view)
        if hint == ReuseHint.HIGH and pinned < self.reserved:
            self._pin_next = True
            return True
        if pinned >= view.ways:
            return False
        return True

    def choose_victim(self, view, access):
        unpinned = [w for w, s in enumerate(view.slots) if not s.pinned]
        return self.base.choose_victim_among(view, unpinned, access)

    def on_insert(self, view, way, access):
        self.base.on_insert(view, way, access)
        if self._pin_next:
            view.slots[way].pinned = True

    def on_hit(self, view, way, access):
        self.base.on_hit(view, way, access)


class UnknownPolicyError(ValueError):
    pass


def make_policy(name, abrs=()):
    """Build a policy from its command-line name.

    Names: lru lip bip dip random nru{1..4} srrip{2,3} brrip{2,3}
    drrip{2,3} ship-mem pin{25,50,75,100} leeway-lru leeway-nru{1..4}
    leeway-static-{bop,rop,vtt7} grasp grasp-hints grasp-insert.
    The optimal oracle ("opt") needs the whole trace and is built by
    the caller instead.
    """
    from cachelab.grasp import GraspPolicy
    from cachelab.leeway import LeewayPolicy

    key = name.lower()
    plain = {
        "lru": LruPolicy,
        "lip": LipPolicy,
        "bip": BipPolicy,
        "dip": DipPolicy,
        "random": RandomPolicy,
        "ship-mem": ShipMemPolicy,
    }
    if key in plain:
        return plain[key]()
    if key.startswith("nru") and key[3:] in ("1", "2", "3", "4"):
        return NruPolicy(bits=int(key[3:]))
    if key.startswith("srrip") and key[5:] in ("2", "3"):
        return SrripPolicy(m=int(key[5:]))
    if key.startswith("brrip") and key[5:] in ("2", "3"):
        return BrripPolicy(m=int(key[5:]))
    if key.startswith("drrip") and key[5:] in ("2", "3"):
        return DrripPolicy(m=int(key[5:]))
    if key.startswith("pin") and key[3:] in ("25", "50", "75", "100"):
        return PinPolicy(percent=int(key[3:]))
    if key == "leeway-lru":
        return LeewayPolicy(base="lru", mode="dynamic")
    if key.startswith("leeway-nru") and key[10:] in ("1", "2", "3", "4"):
        return LeewayPolicy(base="nru", nru_bits=int(key[10:]), mode="dynamic")
    if key == "leeway-static-bop":
        return LeewayPolicy(base="lru", mode="static-bop")
    if key == "leeway-static-rop":
        return LeewayPolicy(base="lru", mode="static-rop")
    if key == "leeway-static-vtt7":
        return LeewayPolicy(base="lru", mode="static-vtt7")
    if key == "grasp":
        return GraspPolicy(abrs=abrs, variant="full")
    if key == "grasp-hints":
        return GraspPolicy(abrs=abrs, variant="hints")
    if key == "grasp-insert":
        return GraspPolicy(abrs=abrs, variant="insert-only")
    raise UnknownPolicyError("unknown policy name: %r" % name)


POLICY_NAMES = (
    ["lru", "lip", "bip", "dip", "random", "ship-mem"]
    + ["nru%d" % b for b in (1, 2, 3, 4)]
    + ["srrip2", "srrip3", "brrip2", "brrip3", "drrip2", "drrip3"]
    + ["pin25", "pin50", "pin75", "pin100"]
    + ["leeway-lru"]
    + ["leeway-nru%d" % b for b in (1, 2, 3, 4)]
    + ["leeway-static-bop", "leeway-static-rop", "leeway-static-vtt7"]
    + ["grasp", "grasp-hints", "grasp-insert", "opt"]
)
