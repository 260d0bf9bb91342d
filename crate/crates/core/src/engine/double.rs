use super::{Decision, OnlinePolicy, PolicyError};
use crate::model::{Instance, Job, Time};
use crate::offline::optimum_machines;

/// Builds the semi-online policy for an optimum bound `m`.
pub type PolicyFamily = Box<dyn Fn(usize) -> Result<Box<dyn OnlinePolicy>, PolicyError>>;

pub struct Epoch {
    pub start: Time,
    /// `m(t_i)`, the optimum of all jobs released up to `t_i`.
    pub optimum: usize,
    /// First machine label of this epoch's block.
    pub offset: usize,
    /// `2ρ·m(t_i)` machines reserved for this epoch.
    pub block: usize,
    policy: Box<dyn OnlinePolicy>,
}

/// Lifts a semi-online policy family to the online setting by doubling.
///
/// A new epoch starts at the first release time `t` where the prefix optimum
/// `m(t)` exceeds twice the optimum of the current epoch's start. Each epoch
/// owns a fresh policy `family(2·m(t_i))` on its own `2ρ·m(t_i)` machines and
/// keeps every job released during it.
pub struct DoublePolicy {
    rho: usize,
    family: PolicyFamily,
    released: Vec<Job>,
    epochs: Vec<Epoch>,
}

impl DoublePolicy {
    pub fn new(rho: usize, family: PolicyFamily) -> Self {
        Self { rho, family, released: Vec::new(), epochs: Vec::new() }
    }

    pub fn epochs(&self) -> &[Epoch] {
        &self.epochs
    }

    pub fn rho(&self) -> usize {
        self.rho
    }
}

impl OnlinePolicy for DoublePolicy {
    fn name(&self) -> String {
        format!("double(rho={})", self.rho)
    }

    fn on_release(&mut self, t: Time, batch: &[Job]) -> Result<(), PolicyError> {
        self.released.extend_from_slice(batch);
        let prefix = Instance::new(self.released.clone()).map_err(|e| PolicyError::Contract(e.to_string()))?;
        let m_t = optimum_machines(&prefix);
        let open_new = match self.epochs.last() {
            None => true,
            Some(e) => m_t > 2 * e.optimum,
        };
        if open_new {
            let offset = self.epochs.last().map_or(0, |e| e.offset + e.block);
            let policy = (self.family)(2 * m_t)?;
            self.epochs.push(Epoch { start: t, optimum: m_t, offset, block: 2 * self.rho * m_t, policy });
        }
        self.epochs.last_mut().unwrap().policy.on_release(t, batch)
    }

    fn decide(&mut self, t: Time) -> Result<Decision, PolicyError> {
        let mut out = Vec::new();
        for (i, epoch) in self.epochs.iter_mut().enumerate() {
            for (id, m) in epoch.policy.decide(t)? {
                if m >= epoch.block {
                    return Err(PolicyError::Contract(format!(
                        "epoch {i} policy used machine {m} beyond its {} reserved",
                        epoch.block
                    )));
                }
                out.push((id, epoch.offset + m));
            }
        }
        Ok(out)
    }

    fn machines_opened(&self) -> usize {
        self.epochs.iter().map(|e| e.block).sum()
    }

    fn stats(&self) -> Vec<(String, String)> {
        let epochs: Vec<String> = self.epochs.iter().map(|e| format!("{}:{}", e.start, e.optimum)).collect();
        let mut out = vec![
            ("double.rho".to_string(), self.rho.to_string()),
            ("double.epochs".to_string(), epochs.join(" ")),
        ];
        for (i, e) in self.epochs.iter().enumerate() {
            out.extend(e.policy.stats().into_iter().map(|(k, v)| (format!("epoch{i}.{k}"), v)));
        }
        out
    }

    fn failures(&self) -> Vec<String> {
        self.epochs.iter().flat_map(|e| e.policy.failures()).collect()
    }
}
