use crate::linalg::CVector;
use crate::topology::CombinationMatrix;
use crate::{Error, Result};

/// Counters for everything that crossed node boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExchangeStats {
    pub rounds: usize,
    pub messages: usize,
    pub values: usize,
    pub min_payload: usize,
    pub max_payload: usize,
}

impl ExchangeStats {
    pub fn merge(&mut self, other: &ExchangeStats) {
        if other.messages == 0 {
            return;
        }
        if self.messages == 0 {
            *self = *other;
            return;
        }
        self.rounds += other.rounds;
        self.messages += other.messages;
        self.values += other.values;
        self.min_payload = self.min_payload.min(other.min_payload);
        self.max_payload = self.max_payload.max(other.max_payload);
    }

    /// Complex values published per node per round.
    pub fn values_per_message(&self) -> f64 {
        self.values as f64 / self.messages.max(1) as f64
    }
}

/// Mediates the combine phase: agents publish one vector per round, and each
/// node's combination only sees what its neighbours published.
#[derive(Debug)]
pub struct Exchange {
    slots: Vec<Option<CVector>>,
    stats: ExchangeStats,
}

impl Exchange {
    pub fn new(n_nodes: usize) -> Self {
        Exchange {
            slots: vec![None; n_nodes],
            stats: ExchangeStats::default(),
        }
    }

    pub fn publish(&mut self, node: usize, payload: CVector) -> Result<()> {
        let slot = self
            .slots
            .get_mut(node)
            .ok_or_else(|| Error::InvalidParameter(format!("node {node} is not part of the exchange")))?;
        if slot.is_some() {
            return Err(Error::InvalidParameter(format!(
                "node {node} published twice in one round"
            )));
        }
        let len = payload.len();
        if self.stats.messages == 0 {
            self.stats.min_payload = len;
            self.stats.max_payload = len;
        } else {
            self.stats.min_payload = self.stats.min_payload.min(len);
            self.stats.max_payload = self.stats.max_payload.max(len);
        }
        self.stats.messages += 1;
        self.stats.values += len;
        *slot = Some(payload);
        Ok(())
    }

    /// Barrier plus combine: returns `Σ_l c_kl ψ_l` for every node and clears
    /// the round.
    pub fn combine_all(&mut self, weights: &CombinationMatrix) -> Result<Vec<CVector>> {
        if let Some(k) = self.slots.iter().position(|s| s.is_none()) {
            return Err(Error::InvalidParameter(format!(
                "node {k} did not publish before the barrier"
            )));
        }
        let n = self.slots.len();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let row = weights.row(k);
            let psis: Vec<&CVector> = row
                .iter()
                .map(|&(l, _)| self.slots[l].as_ref().expect("checked above"))
                .collect();
            let cs: Vec<f64> = row.iter().map(|&(_, c)| c).collect();
            out.push(crate::baselines::combine(&psis, &cs)?);
        }
        for s in &mut self.slots {
            *s = None;
        }
        self.stats.rounds += 1;
        Ok(out)
    }

    pub fn stats(&self) -> ExchangeStats {
        self.stats
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{metropolis_weights, Topology};
    use num_complex::Complex64;

    #[test]
    fn counts_and_barrier() {
        let w = metropolis_weights(&Topology::from_edges(2, &[(0, 1)]).unwrap()).unwrap();
        let mut ex = Exchange::new(2);
        let one = CVector::from_element(3, Complex64::new(1.0, 0.0));
        ex.publish(0, one.clone()).unwrap();
        assert!(ex.combine_all(&w).is_err());
        assert!(ex.publish(0, one.clone()).is_err());
        ex.publish(1, CVector::zeros(3)).unwrap();
        let out = ex.combine_all(&w).unwrap();
        assert_eq!(out[0], CVector::from_element(3, Complex64::new(0.5, 0.0)));
        let s = ex.stats();
        assert_eq!((s.rounds, s.messages, s.values, s.min_payload, s.max_payload), (1, 2, 6, 3, 3));
    }
}
