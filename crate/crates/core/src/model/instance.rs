use std::collections::HashSet;

use super::{Job, JobId, ModelError, Time};

/// A job set kept in canonical order (release ascending, deadline
/// descending, id ascending).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Instance {
    jobs: Vec<Job>,
}

/// Structural flags; both may hold at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Structure {
    pub agreeable: bool,
    pub laminar: bool,
}

impl Structure {
    pub fn is_general(&self) -> bool {
        !self.agreeable && !self.laminar
    }
}

impl Instance {
    pub fn new(mut jobs: Vec<Job>) -> Result<Self, ModelError> {
        let mut seen = HashSet::with_capacity(jobs.len());
        for job in &jobs {
            job.validate()?;
            if !seen.insert(job.id) {
                return Err(ModelError::DuplicateId(job.id));
            }
        }
        jobs.sort_by_key(Job::canonical_key);
        Ok(Self { jobs })
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn get(&self, id: JobId) -> Option<&Job> {
        self.jobs.iter().find(|j| j.id == id)
    }

    pub fn max_deadline(&self) -> Time {
        self.jobs.iter().map(|j| j.d).max().unwrap_or(0)
    }

    pub fn total_work(&self) -> Time {
        self.jobs.iter().map(|j| j.p).sum()
    }

    /// Jobs released at or before `t`, still in canonical order.
    pub fn prefix(&self, t: Time) -> Instance {
        let end = self.jobs.partition_point(|j| j.r <= t);
        Instance { jobs: self.jobs[..end].to_vec() }
    }

    pub fn filter<F: Fn(&Job) -> bool>(&self, keep: F) -> Instance {
        Instance { jobs: self.jobs.iter().copied().filter(|j| keep(j)).collect() }
    }

    pub fn structure(&self) -> Structure {
        structure_of(&self.jobs)
    }
}

/// Classifies a job set as agreeable and/or laminar.
pub fn structure_of(jobs: &[Job]) -> Structure {
    let mut sorted: Vec<&Job> = jobs.iter().collect();
    sorted.sort_by_key(|j| j.canonical_key());

    // Agreeable: every deadline released strictly earlier is ≤ every deadline
    // released later.
    let mut agreeable = true;
    let mut max_before: Option<Time> = None;
    let mut i = 0;
    while i < sorted.len() && agreeable {
        let r = sorted[i].r;
        let group_end = i + sorted[i..].iter().take_while(|j| j.r == r).count();
        let group = &sorted[i..group_end];
        let min_d = group.iter().map(|j| j.d).min().unwrap();
        let max_d = group.iter().map(|j| j.d).max().unwrap();
        if matches!(max_before, Some(m) if m > min_d) {
            agreeable = false;
        }
        max_before = Some(max_before.map_or(max_d, |m| m.max(max_d)));
        i = group_end;
    }

    // Laminar: sweep in canonical order with a stack of open windows.
    let mut laminar = true;
    let mut stack: Vec<Time> = Vec::new();
    for j in &sorted {
        while matches!(stack.last(), Some(&d) if d <= j.r) {
            stack.pop();
        }
        if matches!(stack.last(), Some(&d) if d < j.d) {
            laminar = false;
            break;
        }
        stack.push(j.d);
    }

    Structure { agreeable, laminar }
}
