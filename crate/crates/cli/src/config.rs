use clap::{Args, ValueEnum};
use serde::Serialize;

use framecomplex::ring::ModulusRing;
use framecomplex::symplectic::Family;
use framecomplex::{Budget, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Tsv,
}

/// Flags shared by every subcommand.
#[derive(Clone, Debug, Args, Serialize)]
pub struct RunConfig {
    /// Modulus m of the ring Z/m
    #[arg(long, global = true, default_value_t = 2)]
    pub ring: u64,
    /// Frame family: U, IU, HU, MU or Uprime
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Rank n (the module is R^{2n} for the symplectic families, R^n for U)
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Frame length, subset size or second rank, depending on the command
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Highest homology degree (or cover level) to check
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub max_degree: Option<i64>,
    /// Cap on enumerated objects
    #[arg(long, global = true, default_value_t = Budget::default().elements)]
    pub element_budget: u64,
    /// Cap on nonzeros handed to integer Smith reduction
    #[arg(long, global = true, default_value_t = Budget::default().snf_entries)]
    pub snf_budget: u64,
    /// Primes for the fallback rank screen, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub primes: Vec<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0: one per core)
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Record wall times (reports are then no longer reproducible byte for byte)
    #[arg(long, global = true)]
    pub timings: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.element_budget == 0 || self.snf_budget == 0 {
            return Err(Error::InvalidInput("budgets must be positive".into()));
        }
        if let Some(p) = self.primes.iter().find(|&&p| !framecomplex::ring::is_prime(p)) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        ModulusRing::new(self.ring)?;
        Ok(())
    }

    pub fn ring(&self) -> Result<ModulusRing> {
        ModulusRing::new(self.ring)
    }

    pub fn family_or(&self, default: Family) -> Result<Family> {
        match &self.family {
            Some(f) => f.parse(),
            None => Ok(default),
        }
    }

    pub fn require_n(&self) -> Result<usize> {
        match self.n {
            Some(0) => Err(Error::InvalidInput("--n must be positive".into())),
            Some(n) => Ok(n),
            None => Err(Error::InvalidInput("--n is required".into())),
        }
    }

    /// A fresh budget whose wall-time deadline (if any) starts now.
    pub fn budget(&self) -> Budget {
        Budget { elements: self.element_budget, snf_entries: self.snf_budget, ..Budget::default() }.armed_from_env()
    }
}
