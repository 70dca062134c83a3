"""Page activity region and the demotion candidate scanner.

One 4-byte entry per P-chunk records {allocated, OSPN, referenced}; a 64B
fetch covers 16 entries. Victim selection is a second-chance scan with two
twists: candidates still resident in the metadata cache are skipped (they
are effectively hot even if their lazy referenced bit is stale), and if a
fetched line yields no candidate, one of its allocated entries is drafted
at random to bound worst-case scan traffic.
"""

import random

from .metaformat import pack_activity
from .telemetry import Cat


class ActivityPanic(AssertionError):
    pass


class ActivityTracker:
    def __init__(self, layout, submit, seed=0):
        self.layout = layout
        self.submit = submit
        self.n = layout.promoted_pchunks
        self.words = [0] * self.n
        self.cursor = 0
        self.rng = random.Random(seed)
        self.victims = 0
        self.via_random = 0
        self.sound_selections = 0    # non-random victims audited at selection
        self.allocated_count = 0
        self.lines_scanned_hist = {}
        self.audit_log = None        # set to a list to log every selection

    # Accesses to one activity line within one engine event coalesce into a
    # single channel transaction per direction; `seen` is that event's
    # merge window.
    def _access(self, line_mpa, write, cat, t, seen):
        key = (line_mpa, write)
        prior = seen.get(key)
        if prior is not None:
            return prior
        done = self.submit(line_mpa, write, cat, t)
        seen[key] = done
        return done

    def _rmw(self, pidx, t, seen, cat):
        line = self.layout.activity_line(pidx)
        t = self._access(line, False, cat, t, seen)
        return self._access(line, True, cat, t, seen)

    def on_promote(self, pidx, ospn, t, seen):
        """Fresh promotion: entry becomes allocated and recently used."""
        if self.words[pidx] >> 31:
            raise ActivityPanic(f"P-chunk {pidx} already has a live activity entry")
        self.words[pidx] = pack_activity(1, ospn, 1)
        self.allocated_count += 1
        return self._rmw(pidx, t, seen, Cat.ACT_UPD)

    def on_demote(self, pidx, t, seen):
        if not self.words[pidx] >> 31:
            raise ActivityPanic(f"P-chunk {pidx} demoted without a live entry")
        self.words[pidx] = 0
        self.allocated_count -= 1
        return self._rmw(pidx, t, seen, Cat.ACT_SCAN)

    def set_referenced(self, pidx):
        """State side of a lazy update; the caller issues the merged RMW."""
        self.words[pidx] |= 1

    def lazy_update(self, pidx, t, seen):
        """Eviction-hook path: mark recently used with one merged RMW."""
        self.set_referenced(pidx)
        return self._rmw(pidx, t, seen, Cat.ACT_UPD)

    def select_victim(self, probe, t, seen):
        """Advance the cursor until a demotion candidate emerges.

        Returns (ospn, pidx, via_random, completion). The scan fetches whole
        64B lines; referenced bits of allocated entries get cleared (second
        chance) and dirtied lines are written back before moving on.
        """
        if self.allocated_count == 0:
            raise ActivityPanic("demotion requested with an empty promoted region")
        words = self.words
        lines = 0
        while True:
            line_idx = self.cursor // 16
            start_slot = self.cursor % 16
            line_base = line_idx * 16
            line_mpa = self.layout.activity_line(line_base)
            t = self._access(line_mpa, False, Cat.ACT_SCAN, t, seen)
            lines += 1
            dirty = False
            victim = None
            victim_word = 0
            random_pick = False
            allocated_slots = []
            for k in range(16):
                slot = (start_slot + k) & 15
                idx = line_base + slot
                if idx >= self.n:
                    continue
                word = words[idx]
                if not word >> 31:
                    continue
                allocated_slots.append(slot)
                if word & 1:
                    words[idx] = word & ~1
                    dirty = True
                elif not probe((word >> 1) & 0x3FFFFFFF):
                    victim = (idx, (word >> 1) & 0x3FFFFFFF)
                    victim_word = word
                    self.sound_selections += 1
                    break
                # referenced=0 but cache-resident: skip, leave the bit alone
            if victim is None and allocated_slots:
                allocated_slots.sort()
                slot = allocated_slots[self.rng.randrange(len(allocated_slots))]
                idx = line_base + slot
                victim = (idx, (words[idx] >> 1) & 0x3FFFFFFF)
                victim_word = words[idx]
                random_pick = True
                self.via_random += 1
            if dirty:
                t = self._access(line_mpa, True, Cat.ACT_SCAN, t, seen)
            if victim is not None:
                idx, ospn = victim
                self.victims += 1
                self.cursor = (idx + 1) % self.n
                self.lines_scanned_hist[lines] = self.lines_scanned_hist.get(lines, 0) + 1
                if self.audit_log is not None:
                    # Raw selection evidence: the activity word as fetched and
                    # whether the random fallback fired.
                    self.audit_log.append((idx, ospn, victim_word, random_pick))
                return ospn, idx, random_pick, t
            self.cursor = ((line_idx + 1) * 16) % self.n
            if lines > (self.n // 16) + 2:
                raise ActivityPanic("activity scan wrapped without finding a candidate")
