"""Live-distance based dead block prediction layered on LRU or NRU.

Each block's live distance is the deepest stack position (LRU base) or
highest class value (NRU base) it reaches between fill and last hit; a
block found past its PC's predicted live distance is considered dead.
A tagless predictor table keyed by 14-bit PC signature smooths learned
distances with variance counters: an update in the same direction must
repeat for the variance-tolerance threshold before the stable value
moves.  Bypass-oriented thresholds (slow up, fast down) shed dead-on-
arrival blocks aggressively; reuse-oriented thresholds do the reverse.
In dynamic mode both variants train side by side on disjoint sampler
sets and the one with fewer sampler misses governs follower sets.

Stack positions are counted the way reuse tables usually print them:
a re-reference to the most recently used block has distance 1, so a
stored distance of 0 is reserved for blocks never re-referenced.
"""

from cachelab.engine import Policy

BOP = 0  # bypass-oriented: raising the distance needs 7 confirmations
ROP = 1  # reuse-oriented: lowering the distance needs 7 confirmations

VTT_BY_POLICY = {BOP: (7, 1), ROP: (1, 7)}  # (increase, decrease) thresholds
RETRAIN_PROB = {BOP: 0.01, ROP: 0.03}

LDPT_ENTRIES = 16384
SAMPLER_SETS = 64
DUEL_INTERVAL = 100000  # sampler accesses between dueling decisions

_MODES = ("dynamic", "static-bop", "static-rop", "static-vtt7")


class _Slot:
    __slots__ = ("pos", "pld", "ld", "pc")

    def __init__(self, pos, pld, pc):
        self.pos = pos
        self.pld = pld
        self.ld = 0
        self.pc = pc


class LeewayPolicy(Policy):
    """Dead-block predicting replacement with per-PC live distances."""

    bypasses = True
    flags_dead = True

    def __init__(
        self,
        base="lru",
        nru_bits=2,
        mode="dynamic",
        ldpt_entries=LDPT_ENTRIES,
        sampler_sets=SAMPLER_SETS,
        interval=DUEL_INTERVAL,
    ):
        if base not in ("lru", "nru"):
            raise ValueError("base must be 'lru' or 'nru'")
        if mode not in _MODES:
            raise ValueError("mode must be one of %s" % (_MODES,))
        self.base = base
        self.nru_bits = nru_bits
        self.mode = mode
        self.entries = ldpt_entries
        self.sampler_cfg = sampler_sets
        self.interval = interval
        if mode == "dynamic":
            self.banks = 2
            self.vtt = dict(VTT_BY_POLICY)
            self.retrain = dict(RETRAIN_PROB)
        else:
            self.banks = 1
            if mode == "static-bop":
                self.vtt = {0: VTT_BY_POLICY[BOP]}
                self.retrain = {0: RETRAIN_PROB[BOP]}
            elif mode == "static-rop":
                self.vtt = {0: VTT_BY_POLICY[ROP]}
                self.retrain = {0: RETRAIN_PROB[ROP]}
            else:  # static-vtt7: conservative in both directions
                self.vtt = {0: (7, 7)}
                self.retrain = {0: RETRAIN_PROB[BOP]}
        if base == "lru":
            suffix = "lru"
        else:
            suffix = "nru%d" % nru_bits
        if mode == "dynamic":
            self.name = "leeway-%s" % suffix
        else:
            self.name = "leeway-%s" % mode if base == "lru" else "leeway-%s-%s" % (suffix, mode)

    def reset(self, geometry, rng):
        super().reset(geometry, rng)
        if self.base == "lru":
            self.maxpos = geometry.ways
        else:
            self.maxpos = (1 << self.nru_bits) - 1
        # predictor table: stable distance starts at the ceiling so an
        # untrained PC is never bypassed and never flags blocks dead
        self.stable = [[self.maxpos] * self.entries for _ in range(self.banks)]
        self.var_count = [[0] * self.entries for _ in range(self.banks)]
        self.var_dir = [[0] * self.entries for _ in range(self.banks)]
        self.sampler_bank = {}
        num_sets = geometry.num_sets
        if self.banks == 2:
            n = min(self.sampler_cfg, num_sets // 2)
            if n >= 1:
                stride = num_sets // (2 * n)
                for i in range(n):
                    self.sampler_bank[2 * i * stride] = BOP
                    self.sampler_bank[(2 * i + 1) * stride] = ROP
                self.duel_enabled = True
            else:
                self.sampler_bank[0] = BOP  # single set: train BOP only
                self.duel_enabled = False
        else:
            n = min(self.sampler_cfg, num_sets)
            stride = max(1, num_sets // n)
            for i in range(n):
                self.sampler_bank[i * stride] = 0
            self.duel_enabled = False
        self.winner = BOP if self.banks == 2 else 0
        self.sampler_misses = [0] * self.banks
        self.sampler_accesses = 0
        self._pending_pld = self.maxpos

    # -- predictor table ------------------------------------------------

    def _index(self, pc):
        return pc % self.entries

    def stable_distance(self, pc, bank=None):
        return self.stable[self.winner if bank is None else bank][self._index(pc)]

    def _ldpt_update(self, bank, pc, observed):
        i = self._index(pc)
        s = self.stable[bank][i]
        if observed == s:
            self.var_count[bank][i] = 0
            return
        direction = 1 if observed > s else 0
        if direction != self.var_dir[bank][i]:
            self.var_dir[bank][i] = direction
            self.var_count[bank][i] = 1
        else:
            self.var_count[bank][i] += 1
        inc, dec = self.vtt[bank]
        if self.var_count[bank][i] >= (inc if direction else dec):
            self.stable[bank][i] = observed
            self.var_count[bank][i] = 0

    # -- dueling ---------------------------------------------------------

    def _sampler_tick(self):
        self.sampler_accesses += 1
        if self.duel_enabled and self.sampler_accesses % self.interval == 0:
            self._duel()

    def _duel(self):
        if not self.duel_enabled:
            return
        challenger = 1 - self.winner
        if self.sampler_misses[challenger] < self.sampler_misses[self.winner]:
            self.winner = challenger
        self.sampler_misses = [0, 0]

    def on_interval(self, counters):
        self._duel()

    # -- position bookkeeping ---------------------------------------------

    def _depth(self, slot_state):
        if self.base == "lru":
            return slot_state.pos + 1
        return slot_state.pos

    def _promote(self, view, way):
        slots = view.slots
        if self.base == "lru":
            pos = slots[way].state.pos
            for s in slots:
                if s.valid and s.state.pos < pos:
                    s.state.pos += 1
            slots[way].state.pos = 0
        else:
            slots[way].state.pos = 0

    def _base_victim(self, view):
        slots = view.slots
        if self.base == "lru":
            best, best_pos = 0, -1
            for w, s in enumerate(slots):
                if s.state.pos > best_pos:
                    best_pos = s.state.pos
                    best = w
            return best
        class_max = self.maxpos
        while True:
            at_max = [w for w, s in enumerate(slots) if s.state.pos == class_max]
            if at_max:
                return at_max[0] if len(at_max) == 1 else self.rng.choice(at_max)
            for s in slots:
                s.state.pos += 1

    # -- policy hooks ------------------------------------------------------

    def decide_insert(self, view, access):
        bank_here = self.sampler_bank.get(view.set_index)
        if bank_here is not None:
            if self.duel_enabled:
                self.sampler_misses[bank_here] += 1
            self._sampler_tick()
            governing = bank_here
        else:
            governing = self.winner
        stable = self.stable[governing][self._index(access.pc_signature)]
        if stable == 0:
            if bank_here is not None and self.rng.random() < self.retrain[governing]:
                self._pending_pld = 0  # retraining fill
                return True
            return False
        self._pending_pld = stable
        return True

    def on_insert(self, view, way, access):
        slots = view.slots
        new = _Slot(0, self._pending_pld, access.pc_signature)
        if self.base == "lru":
            others = sorted(
                (s.state.pos, w) for w, s in enumerate(slots) if s.valid and w != way
            )
            for rank, (_, w) in enumerate(others):
                slots[w].state.pos = rank + 1
        slots[way].state = new

    def on_hit(self, view, way, access):
        if view.set_index in self.sampler_bank:
            self._sampler_tick()
        st = view.slots[way].state
        depth = self._depth(st)
        if view.set_index in self.sampler_bank and depth > st.ld:
            st.ld = depth
        if depth > st.pld:
            st.pld = depth
        self._promote(view, way)

    def choose_victim(self, view, access):
        slots = view.slots
        dead = []
        for w, s in enumerate(slots):
            depth = self._depth(s.state)
            if depth > s.state.pld:
                # min predicted distance first, then deepest, then lowest way
                dead.append((s.state.pld, -depth, w))
        if dead:
            way = min(dead)[2]
            self.predicted_dead = True
        else:
            way = self._base_victim(view)
        bank_here = self.sampler_bank.get(view.set_index)
        if bank_here is not None:
            vstate = slots[way].state
            self._ldpt_update(bank_here, vstate.pc, vstate.ld)
        return way
