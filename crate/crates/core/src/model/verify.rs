use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Instance, JobId, Schedule, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Fewer than `p_j` slots inside `[r_j, d_j)`.
    DeadlineMiss,
    /// The job appears in a slot outside its window, or is unknown.
    OutsideWindow,
    /// The same id appears twice in one slot.
    DuplicateInSlot,
    /// More ids in a slot than machines.
    OverCapacity,
    /// More than `p_j` slots inside the window.
    ExcessWork,
}

impl ViolationKind {
    pub const ALL: [ViolationKind; 5] = [
        ViolationKind::DeadlineMiss,
        ViolationKind::OutsideWindow,
        ViolationKind::DuplicateInSlot,
        ViolationKind::OverCapacity,
        ViolationKind::ExcessWork,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ViolationKind::DeadlineMiss => "deadline-miss",
            ViolationKind::OutsideWindow => "outside-window",
            ViolationKind::DuplicateInSlot => "duplicate-in-slot",
            ViolationKind::OverCapacity => "over-capacity",
            ViolationKind::ExcessWork => "excess-work",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    Job(JobId),
    Slot(Time),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subject: Subject,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.feasible() {
            return writeln!(f, "feasible");
        }
        for v in &self.violations {
            match v.subject {
                Subject::Job(id) => writeln!(f, "{} job {}: {}", v.kind, id, v.detail)?,
                Subject::Slot(t) => writeln!(f, "{} slot {}: {}", v.kind, t, v.detail)?,
            }
        }
        Ok(())
    }
}

/// Checks `sched` against `inst` on `machines` machines and lists every
/// violation found. Never fails; malformed input only produces violations.
pub fn verify_schedule(inst: &Instance, sched: &Schedule, machines: usize) -> VerifyReport {
    let jobs: HashMap<JobId, _> = inst.jobs().iter().map(|j| (j.id, j)).collect();
    let mut violations = Vec::new();
    let mut in_window: BTreeMap<JobId, Time> = BTreeMap::new();

    for (t, slot) in sched.slots().iter().enumerate() {
        let t = t as Time;
        if slot.len() > machines {
            violations.push(Violation {
                kind: ViolationKind::OverCapacity,
                subject: Subject::Slot(t),
                detail: format!("{} jobs on {} machines", slot.len(), machines),
            });
        }
        let mut seen: Vec<JobId> = Vec::with_capacity(slot.len());
        for &id in slot {
            if seen.contains(&id) {
                violations.push(Violation {
                    kind: ViolationKind::DuplicateInSlot,
                    subject: Subject::Slot(t),
                    detail: format!("job {id} listed twice"),
                });
                continue;
            }
            seen.push(id);
            match jobs.get(&id) {
                None => violations.push(Violation {
                    kind: ViolationKind::OutsideWindow,
                    subject: Subject::Job(id),
                    detail: format!("unknown job at slot {t}"),
                }),
                Some(job) if !job.in_window(t) => violations.push(Violation {
                    kind: ViolationKind::OutsideWindow,
                    subject: Subject::Job(id),
                    detail: format!("slot {t} outside [{}, {})", job.r, job.d),
                }),
                Some(_) => *in_window.entry(id).or_default() += 1,
            }
        }
    }

    for job in inst.jobs() {
        let got = in_window.get(&job.id).copied().unwrap_or(0);
        if got < job.p {
            violations.push(Violation {
                kind: ViolationKind::DeadlineMiss,
                subject: Subject::Job(job.id),
                detail: format!("{got} of {} units by {}", job.p, job.d),
            });
        } else if got > job.p {
            violations.push(Violation {
                kind: ViolationKind::ExcessWork,
                subject: Subject::Job(job.id),
                detail: format!("{got} units for p = {}", job.p),
            });
        }
    }

    VerifyReport { violations }
}
