"""Graph-specialized reuse hints over a dynamic RRIP base.

Software declares the address bounds of highly-reused property arrays;
the first cache-sized chunk of each bounded region (where a
degree-ordered layout concentrates its hottest elements) classifies as
High-Reuse, the next chunk as Moderate-Reuse, the rest of the region
and every other address as Low-Reuse.  With no regions declared at all
every access is Default and managed purely by the base policy, so the
policy is then decision-for-decision the base DRRIP.  Hints only nudge
insertion and hit promotion; victim selection is the base's unmodified
RRPV scan, so no block is ever immortal.
"""

from cachelab.policies import DrripPolicy
from cachelab.trace import ReuseHint

VARIANTS = ("full", "insert-only", "hints")


class GraspConfigError(ValueError):
    pass


class RegionMap:
    """Address classifier for a set of bounded regions.

    Each region [start, end) is split into a High-Reuse leading chunk
    and a Moderate-Reuse second chunk, both of size
    llc_capacity_bytes // region_count, clipped to the region.
    """

    def __init__(self, abrs, llc_capacity_bytes):
        regions = []
        for start, end in abrs:
            if not 0 <= start < end:
                raise GraspConfigError("region bounds must satisfy 0 <= start < end")
            regions.append((start, end))
        regions.sort()
        for (s1, e1), (s2, _) in zip(regions, regions[1:]):
            if s2 < e1:
                raise GraspConfigError("regions overlap: [%d,%d) and [%d,...)" % (s1, e1, s2))
        chunk = llc_capacity_bytes // len(regions) if regions else 0
        self.regions = [
            (start, min(start + chunk, end), min(start + 2 * chunk, end), end)
            for start, end in regions
        ]

    def classify(self, address):
        if not self.regions:
            return ReuseHint.DEFAULT
        for start, high_end, mod_end, end in self.regions:
            if start <= address < end:
                if address < high_end:
                    return ReuseHint.HIGH
                if address < mod_end:
                    return ReuseHint.MODERATE
                return ReuseHint.LOW
        return ReuseHint.LOW


class GraspPolicy(DrripPolicy):
    """DRRIP with insertion/promotion specialized by reuse class."""

    def __init__(self, abrs=(), variant="full", m=3, **kwargs):
        super().__init__(m=m, **kwargs)
        if variant not in VARIANTS:
            raise GraspConfigError("variant must be one of %s" % (VARIANTS,))
        self.abrs = tuple(abrs)
        self.variant = variant
        self.name = {"full": "grasp", "insert-only": "grasp-insert", "hints": "grasp-hints"}[
            variant
        ]

    def reset(self, geometry, rng):
        super().reset(geometry, rng)
        self.region_map = RegionMap(self.abrs, geometry.capacity_bytes) if self.abrs else None

    def _hint(self, access):
        if self.region_map is not None:
            hint = self.region_map.classify(access.address)
            if access.hint_valid and access.reuse_hint != hint:
                raise GraspConfigError(
                    "trace hint %s disagrees with region classification %s at 0x%x"
                    % (access.reuse_hint.name, hint.name, access.address)
                )
            return hint
        if access.hint_valid:
            return access.reuse_hint
        return ReuseHint.DEFAULT

    def on_insert(self, view, way, access):
        hint = self._hint(access)
        if hint == ReuseHint.DEFAULT:
            super().on_insert(view, way, access)
            return
        if self.variant == "hints":
            # high-reuse near the eviction point, other hinted blocks at it
            if hint == ReuseHint.HIGH:
                view.slots[way].state = self.rrpv_max - 1
            else:
                view.slots[way].state = self.rrpv_max
            return
        if hint == ReuseHint.HIGH:
            view.slots[way].state = 0
        elif hint == ReuseHint.MODERATE:
            view.slots[way].state = self.rrpv_max - 1
        else:
            view.slots[way].state = self.rrpv_max

    def on_hit(self, view, way, access):
        if self.variant != "full":
            super().on_hit(view, way, access)
            return
        hint = self._hint(access)
        if hint in (ReuseHint.MODERATE, ReuseHint.LOW):
            if self.duel.shadow:
                self._shadow_access(view, access)
            if view.slots[way].state > 0:
                view.slots[way].state -= 1
        else:
            super().on_hit(view, way, access)
