//! Deterministic tally of scalar arithmetic performed by solver kernels.
//!
//! Every add/sub, mul, div, comparison, exp and log counts as one
//! operation. Kernels record their counts in bulk after each loop, so the
//! tally is exact for the straight-line code it describes and independent
//! of timing or scheduling.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpCounter {
    pub adds: u64,
    pub muls: u64,
    pub divs: u64,
    pub exps: u64,
    pub logs: u64,
    pub compares: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.adds + self.muls + self.divs + self.exps + self.logs + self.compares
    }

    #[inline]
    pub fn add(&mut self, k: usize) {
        self.adds += k as u64;
    }

    #[inline]
    pub fn mul(&mut self, k: usize) {
        self.muls += k as u64;
    }

    #[inline]
    pub fn div(&mut self, k: usize) {
        self.divs += k as u64;
    }

    #[inline]
    pub fn exp(&mut self, k: usize) {
        self.exps += k as u64;
    }

    #[inline]
    pub fn log(&mut self, k: usize) {
        self.logs += k as u64;
    }

    #[inline]
    pub fn cmp(&mut self, k: usize) {
        self.compares += k as u64;
    }

    /// Componentwise sum, for merging the tallies of pipeline stages.
    pub fn merge(&mut self, other: &OpCounter) {
        self.adds += other.adds;
        self.muls += other.muls;
        self.divs += other.divs;
        self.exps += other.exps;
        self.logs += other.logs;
        self.compares += other.compares;
    }
}
