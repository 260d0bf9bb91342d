use std::collections::BTreeMap;

use super::{JobId, Time};

/// Per-slot job sets over `[0, horizon)`.
///
/// Slot `t` holds the ids processed during `[t, t+1)`. Machines are not part
/// of the representation; [`Schedule::labeled`] assigns labels post hoc.
/// Slots are plain vectors so that a malformed schedule (a duplicate id in one
/// slot) stays representable and can be reported by the verifier.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    slots: Vec<Vec<JobId>>,
}

impl Schedule {
    pub fn new(horizon: Time) -> Self {
        Self { slots: vec![Vec::new(); horizon.max(0) as usize] }
    }

    pub fn from_slots(slots: Vec<Vec<JobId>>) -> Self {
        Self { slots }
    }

    pub fn horizon(&self) -> Time {
        self.slots.len() as Time
    }

    pub fn slot(&self, t: Time) -> &[JobId] {
        usize::try_from(t).ok().and_then(|i| self.slots.get(i)).map_or(&[], Vec::as_slice)
    }

    pub fn slots(&self) -> &[Vec<JobId>] {
        &self.slots
    }

    pub fn slot_mut(&mut self, t: Time) -> &mut Vec<JobId> {
        let i = t as usize;
        if i >= self.slots.len() {
            self.slots.resize(i + 1, Vec::new());
        }
        &mut self.slots[i]
    }

    pub fn push(&mut self, t: Time, id: JobId) {
        self.slot_mut(t).push(id);
    }

    pub fn remove(&mut self, t: Time, id: JobId) -> bool {
        let slot = self.slot_mut(t);
        match slot.iter().position(|&x| x == id) {
            Some(pos) => {
                slot.remove(pos);
                true
            }
            None => false,
        }
    }

    pub fn load(&self, t: Time) -> usize {
        self.slot(t).len()
    }

    pub fn loads(&self) -> Vec<usize> {
        self.slots.iter().map(Vec::len).collect()
    }

    pub fn peak(&self) -> usize {
        self.slots.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn runs(&self, t: Time, id: JobId) -> bool {
        self.slot(t).contains(&id)
    }

    /// Slots in which each job runs, ascending.
    pub fn slots_by_job(&self) -> BTreeMap<JobId, Vec<Time>> {
        let mut out: BTreeMap<JobId, Vec<Time>> = BTreeMap::new();
        for (t, slot) in self.slots.iter().enumerate() {
            for &id in slot {
                out.entry(id).or_default().push(t as Time);
            }
        }
        out
    }

    /// Total units processed, `Σ_t |slots[t]|`.
    pub fn work(&self) -> usize {
        self.slots.iter().map(Vec::len).sum()
    }

    /// Machine labels by sorting the ids within each slot: the k-th smallest
    /// id runs on machine k.
    pub fn labeled(&self) -> Vec<Vec<(JobId, usize)>> {
        self.slots
            .iter()
            .map(|slot| {
                let mut ids = slot.clone();
                ids.sort_unstable();
                ids.into_iter().enumerate().map(|(m, id)| (id, m)).collect()
            })
            .collect()
    }
}
