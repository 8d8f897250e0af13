use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Resource limits shared by enumeration, chain-complex construction and
/// integer reduction. Exceeding any of them yields an inconclusive verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Budget {
    /// Maximum number of enumerated objects (vectors, matrices, frames).
    pub elements: u64,
    /// Maximum number of cells in a single chain group.
    pub chains: u64,
    /// Maximum number of nonzeros handed to integer Smith reduction.
    pub snf_entries: u64,
    /// Maximum side length of a dense reduction with transforms.
    pub dense_dim: usize,
    /// Maximum coset-table size for the coset enumerator.
    pub cosets: usize,
    #[serde(skip)]
    pub deadline: Option<Instant>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            elements: 20_000_000,
            chains: 4_000_000,
            snf_entries: 40_000_000,
            dense_dim: 1_200,
            cosets: 200_000,
            deadline: None,
        }
    }
}

impl Budget {
    /// Env var holding a wall-time cap in milliseconds for a single verdict.
    pub const WALL_TIME_ENV: &'static str = "FRAMECOMPLEX_BUDGET_MS";

    pub fn with_wall_time(mut self, ms: u64) -> Self {
        self.deadline = Some(Instant::now() + Duration::from_millis(ms));
        self
    }

    /// Re-arms the deadline from `FRAMECOMPLEX_BUDGET_MS`, if set.
    pub fn armed_from_env(&self) -> Self {
        let mut b = self.clone();
        b.deadline = std::env::var(Self::WALL_TIME_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .map(|ms| Instant::now() + Duration::from_millis(ms));
        b
    }

    pub fn check_time(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::BudgetExceeded("wall time".into())),
            _ => Ok(()),
        }
    }

    pub fn check_elements(&self, count: u64, what: &str) -> Result<()> {
        if count > self.elements {
            return Err(Error::BudgetExceeded(format!(
                "{what}: {count} exceeds element budget {}",
                self.elements
            )));
        }
        self.check_time()
    }

    pub fn check_chains(&self, count: u64, what: &str) -> Result<()> {
        if count > self.chains {
            return Err(Error::BudgetExceeded(format!(
                "{what}: {count} cells exceeds chain budget {}",
                self.chains
            )));
        }
        self.check_time()
    }
}
