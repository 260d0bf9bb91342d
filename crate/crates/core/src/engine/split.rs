use super::{Decision, OnlinePolicy, PolicyError};
use crate::model::{Job, Rational, Time};

/// Routes α-loose jobs to one sub-policy and α-tight jobs to another, each on
/// its own machines. Tight machine labels follow the loose ones.
pub struct SplitPolicy<L, T> {
    alpha: Rational,
    pub loose: L,
    pub tight: T,
    loose_jobs: usize,
    tight_jobs: usize,
}

impl<L: OnlinePolicy, T: OnlinePolicy> SplitPolicy<L, T> {
    pub fn new(alpha: Rational, loose: L, tight: T) -> Result<Self, PolicyError> {
        crate::model::check_open_unit("alpha", alpha).map_err(|e| PolicyError::Param(e.to_string()))?;
        Ok(Self { alpha, loose, tight, loose_jobs: 0, tight_jobs: 0 })
    }

    pub fn routed(&self) -> (usize, usize) {
        (self.loose_jobs, self.tight_jobs)
    }
}

impl<L: OnlinePolicy, T: OnlinePolicy> OnlinePolicy for SplitPolicy<L, T> {
    fn name(&self) -> String {
        format!("split[{}|{}]", self.loose.name(), self.tight.name())
    }

    fn on_release(&mut self, t: Time, batch: &[Job]) -> Result<(), PolicyError> {
        let (loose, tight): (Vec<Job>, Vec<Job>) = batch.iter().partition(|j| j.is_loose(self.alpha));
        self.loose_jobs += loose.len();
        self.tight_jobs += tight.len();
        if !loose.is_empty() {
            self.loose.on_release(t, &loose)?;
        }
        if !tight.is_empty() {
            self.tight.on_release(t, &tight)?;
        }
        Ok(())
    }

    fn decide(&mut self, t: Time) -> Result<Decision, PolicyError> {
        let mut out = self.loose.decide(t)?;
        let offset = self.loose.machines_opened();
        out.extend(self.tight.decide(t)?.into_iter().map(|(id, m)| (id, m + offset)));
        Ok(out)
    }

    fn machines_opened(&self) -> usize {
        self.loose.machines_opened() + self.tight.machines_opened()
    }

    fn stats(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("split.alpha".to_string(), self.alpha.to_string()),
            ("split.loose_jobs".to_string(), self.loose_jobs.to_string()),
            ("split.tight_jobs".to_string(), self.tight_jobs.to_string()),
            ("loose.machines".to_string(), self.loose.machines_opened().to_string()),
            ("tight.machines".to_string(), self.tight.machines_opened().to_string()),
        ];
        out.extend(self.loose.stats().into_iter().map(|(k, v)| (format!("loose.{k}"), v)));
        out.extend(self.tight.stats().into_iter().map(|(k, v)| (format!("tight.{k}"), v)));
        out
    }

    fn failures(&self) -> Vec<String> {
        let mut out = self.loose.failures();
        out.extend(self.tight.failures());
        out
    }
}
