//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Problems are small (at most a few hundred columns), so a full tableau is
//! simpler and more predictable than anything revised.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::fabs;

const EPS: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize cᵀx` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<(&[f64], f64)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, *value)),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram { objective, constraints: Vec::new() }
    }

    pub fn with(mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        self.push(coeffs, relation, rhs);
        self
    }

    pub fn push(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.objective.len());
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    nvars: usize,
    first_artificial: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let nvars = lp.objective.len();
        let m = lp.constraints.len();
        let n_slack = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        // After sign normalization every Eq and every Ge row needs an artificial.
        let mut flipped = Vec::with_capacity(m);
        let mut n_art = 0;
        for c in &lp.constraints {
            let flip = c.rhs < 0.0;
            let rel = match (c.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            if rel != Relation::Le {
                n_art += 1;
            }
            flipped.push((flip, rel));
        }
        let first_artificial = nvars + n_slack;
        let cols = first_artificial + n_art + 1;
        let rows = m + 1;
        let mut data = vec![0.0; rows * cols];
        let mut basis = vec![0; m];
        let (mut slack, mut art) = (nvars, first_artificial);
        for (i, (c, &(flip, rel))) in lp.constraints.iter().zip(&flipped).enumerate() {
            let sgn = if flip { -1.0 } else { 1.0 };
            let row = &mut data[i * cols..(i + 1) * cols];
            for (j, v) in c.coeffs.iter().enumerate() {
                row[j] = sgn * v;
            }
            row[cols - 1] = sgn * c.rhs;
            if c.relation != Relation::Eq {
                row[slack] = if rel == Relation::Le { 1.0 } else { -1.0 };
                if rel == Relation::Le {
                    basis[i] = slack;
                }
                slack += 1;
            }
            if rel != Relation::Le {
                row[art] = 1.0;
                basis[i] = art;
                art += 1;
            }
        }
        Tableau { rows, cols, nvars, first_artificial, data, basis }
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let cols = self.cols;
        let p = self.at(pr, pc);
        for c in 0..cols {
            self.data[pr * cols + c] /= p;
        }
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.at(r, pc);
            if f != 0.0 {
                for c in 0..cols {
                    let v = self.data[pr * cols + c];
                    self.data[r * cols + c] -= f * v;
                }
            }
        }
        self.basis[pr] = pc;
    }

    /// Iterates until optimal for the objective row stored last.
    /// Returns false when the problem is unbounded.
    fn iterate(&mut self, allowed: usize) -> bool {
        let z = self.rows - 1;
        let rhs = self.cols - 1;
        loop {
            let entering = (0..allowed).find(|&c| self.at(z, c) < -EPS);
            let Some(pc) = entering else { return true };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..z {
                let a = self.at(r, pc);
                if a > EPS {
                    let ratio = self.at(r, rhs) / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bv)) => {
                            if ratio < bv - EPS
                                || (fabs(ratio - bv) <= EPS && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bv))
                            }
                        }
                    };
                }
            }
            match best {
                None => return false,
                Some((pr, _)) => self.pivot(pr, pc),
            }
        }
    }

    fn run(mut self, objective: &[f64]) -> LpOutcome {
        let z = self.rows - 1;
        let cols = self.cols;
        let rhs = cols - 1;
        let has_art = self.first_artificial < rhs;
        if has_art {
            for c in self.first_artificial..rhs {
                self.data[z * cols + c] = 1.0;
            }
            for r in 0..z {
                if self.basis[r] >= self.first_artificial {
                    for c in 0..cols {
                        let v = self.data[r * cols + c];
                        self.data[z * cols + c] -= v;
                    }
                }
            }
            self.iterate(rhs);
            // Phase-one optimum is -Σ artificials.
            if self.at(z, rhs) < -1e-9 * (1.0 + self.rhs_scale()) {
                return LpOutcome::Infeasible;
            }
            for r in 0..z {
                if self.basis[r] >= self.first_artificial {
                    if let Some(c) = (0..self.first_artificial).find(|&c| fabs(self.at(r, c)) > 1e-9) {
                        self.pivot(r, c);
                    }
                }
            }
        }
        for c in 0..cols {
            self.data[z * cols + c] = 0.0;
        }
        for (j, &cj) in objective.iter().enumerate() {
            self.data[z * cols + j] = -cj;
        }
        for r in 0..z {
            let b = self.basis[r];
            let cb = if b < self.nvars { objective[b] } else { 0.0 };
            if cb != 0.0 {
                for c in 0..cols {
                    let v = self.data[r * cols + c];
                    self.data[z * cols + c] += cb * v;
                }
            }
        }
        if !self.iterate(self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; self.nvars];
        for r in 0..z {
            if self.basis[r] < self.nvars {
                x[self.basis[r]] = self.at(r, rhs);
            }
        }
        let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpOutcome::Optimal { x, value }
    }

    fn rhs_scale(&self) -> f64 {
        (0..self.rows - 1)
            .map(|r| fabs(self.at(r, self.cols - 1)))
            .fold(0.0, f64::max)
    }
}
