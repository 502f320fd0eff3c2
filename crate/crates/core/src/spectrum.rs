//! Bath eigenvalue classes.
//!
//! Every bath configuration `|n>` is an eigenstate of the collective
//! coupling `g sum_i sz_i`, the collective splitting `sum_i omega_i sz_i` and
//! the Ising term `sum_bonds chi_b sz_i sz_j`. Only those three eigenvalues
//! enter the reduced dynamics, so configurations sharing them are merged
//! into classes with integer multiplicities. For a uniform bath the classes
//! are labelled by the number of down spins `k` and domain walls `w`, which
//! collapses `2^N` configurations into `O(N^2)` classes.

use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::params::{Boundary, ModelParams};

/// Largest bath handled by explicit enumeration.
pub const MAX_EXACT_SPINS: usize = 20;
/// Largest bath whose total multiplicity `2^N` fits the integer counters.
pub const MAX_COLLAPSED_SPINS: usize = 126;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    /// Number of down spins.
    pub k: usize,
    /// Number of anti-aligned bonds; `None` once classes are merged over it.
    pub walls: Option<usize>,
    /// Eigenvalue of `g sum_i sz_i`.
    pub coupling: f64,
    /// Eigenvalue of `sum_i omega_i sz_i`.
    pub splitting: f64,
    /// Eigenvalue of `sum_bonds chi_b sz_i sz_j`.
    pub interaction: f64,
    pub multiplicity: u128,
    pub log_mult: f64,
}

impl SpectrumEntry {
    /// `ln c_n` with `c_n = exp(-beta (splitting/2 + interaction))`.
    pub fn log_boltzmann(&self, beta: f64) -> f64 {
        -beta * (0.5 * self.splitting + self.interaction)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub n: usize,
    pub entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    /// Collapsed spectrum for uniform baths, exact enumeration otherwise.
    pub fn for_params(p: &ModelParams) -> Result<Spectrum> {
        if p.uniform_bath().is_some() {
            collapse_uniform(p)
        } else {
            enumerate_exact(p)
        }
    }

    pub fn total_multiplicity(&self) -> u128 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Multiplicities keyed by `(k, walls)`.
    pub fn histogram(&self) -> BTreeMap<(usize, Option<usize>), u128> {
        let mut h = BTreeMap::new();
        for e in &self.entries {
            *h.entry((e.k, e.walls)).or_insert(0) += e.multiplicity;
        }
        h
    }

    /// Columns `k, w, G, Omega, alpha, multiplicity`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k,w,G,Omega,alpha,multiplicity")?;
        for e in &self.entries {
            let w = e.walls.map(|w| w.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e},{}",
                e.k, w, e.coupling, e.splitting, e.interaction, e.multiplicity
            )?;
        }
        Ok(())
    }
}

/// One entry per bath configuration, spin `i` up when bit `i` of the index
/// is clear.
pub fn enumerate_exact(p: &ModelParams) -> Result<Spectrum> {
    if p.n > MAX_EXACT_SPINS {
        return Err(Error::TooManySpins { what: "exact enumeration", n: p.n, max: MAX_EXACT_SPINS });
    }
    let omegas = p.omegas();
    let chis = p.chis();
    let bonds = p.bonds();
    let spin = |bits: usize, i: usize| if bits >> i & 1 == 0 { 1.0 } else { -1.0 };

    let mut entries: Vec<SpectrumEntry> = (0..1usize << p.n)
        .map(|bits| {
            let k = bits.count_ones() as usize;
            let total: f64 = (0..p.n).map(|i| spin(bits, i)).sum();
            let splitting = (0..p.n).map(|i| omegas[i] * spin(bits, i)).sum();
            let mut walls = 0;
            let mut interaction = 0.0;
            for (&(i, j), &chi) in bonds.iter().zip(&chis) {
                let ss = spin(bits, i) * spin(bits, j);
                if ss < 0.0 {
                    walls += 1;
                }
                interaction += chi * ss;
            }
            SpectrumEntry {
                k,
                walls: Some(walls),
                coupling: p.g * total,
                splitting,
                interaction,
                multiplicity: 1,
                log_mult: 0.0,
            }
        })
        .collect();
    // stable: configurations of one class stay in index order
    entries.sort_by_key(|e| (e.k, e.walls));
    Ok(Spectrum { n: p.n, entries })
}

/// Classes `(k, w)` of a uniform bath with exact integer multiplicities.
///
/// When `chi = 0` the wall label is irrelevant and the classes are merged
/// into the `N + 1` binomial classes.
pub fn collapse_uniform(p: &ModelParams) -> Result<Spectrum> {
    let (omega, chi) = p
        .uniform_bath()
        .ok_or_else(|| Error::NonUniform("collapse needs the same omega and chi everywhere".into()))?;
    if p.n > MAX_COLLAPSED_SPINS {
        return Err(Error::TooManySpins { what: "spectrum collapse", n: p.n, max: MAX_COLLAPSED_SPINS });
    }
    let n = p.n;
    let bonds = p.bond_count() as f64;
    let class = |k: usize, walls: Option<usize>, m: u128| {
        let total = n as f64 - 2.0 * k as f64;
        let interaction = match walls {
            Some(w) => chi * (bonds - 2.0 * w as f64),
            None => 0.0,
        };
        SpectrumEntry {
            k,
            walls,
            coupling: p.g * total,
            splitting: omega * total,
            interaction,
            multiplicity: m,
            log_mult: (m as f64).ln(),
        }
    };

    let entries = if chi == 0.0 {
        binomial_row(n).into_iter().enumerate().map(|(k, m)| class(k, None, m)).collect()
    } else {
        let counts = wall_counts(n, p.boundary);
        let mut entries = Vec::new();
        for (k, row) in counts.iter().enumerate() {
            for (w, &m) in row.iter().enumerate() {
                if m > 0 {
                    entries.push(class(k, Some(w), m));
                }
            }
        }
        entries
    };
    Ok(Spectrum { n, entries })
}

/// `C(n, k)` for `k = 0..=n`.
fn binomial_row(n: usize) -> Vec<u128> {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for k in 1..row.len() {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
    }
    row
}

/// `counts[k][w]`: number of spin strings with `k` down spins and `w` domain
/// walls, by a transfer-matrix sweep along the chain.
fn wall_counts(n: usize, boundary: Boundary) -> Vec<Vec<u128>> {
    let max_walls = n;
    let mut counts = vec![vec![0u128; max_walls + 1]; n + 1];
    for first in 0..2usize {
        // dp[last][k][w]
        let mut dp = vec![vec![vec![0u128; max_walls + 1]; n + 1]; 2];
        dp[first][first][0] = 1;
        for _ in 1..n {
            let mut next = vec![vec![vec![0u128; max_walls + 1]; n + 1]; 2];
            for last in 0..2 {
                for k in 0..=n {
                    for w in 0..=max_walls {
                        let c = dp[last][k][w];
                        if c == 0 {
                            continue;
                        }
                        for s in 0..2 {
                            let nk = k + s;
                            let nw = w + usize::from(s != last);
                            if nk <= n && nw <= max_walls {
                                next[s][nk][nw] += c;
                            }
                        }
                    }
                }
            }
            dp = next;
        }
        for (last, table) in dp.iter().enumerate() {
            for k in 0..=n {
                for w in 0..=max_walls {
                    let c = table[k][w];
                    if c == 0 {
                        continue;
                    }
                    let closing = match boundary {
                        Boundary::Periodic => usize::from(last != first),
                        Boundary::Open => 0,
                    };
                    counts[k][w + closing] += c;
                }
            }
        }
    }
    counts
}
