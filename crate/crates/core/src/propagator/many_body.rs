//! Slater-determinant amplitudes and mixed-state overlaps in the xx model.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::Propagator;

/// Largest chain accepted by [`mixed_state_overlap`].
pub const MAX_MIXED_N: usize = 14;

fn check_configuration(indices: &[usize], n: usize) -> Result<()> {
    for &i in indices {
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
    }
    for w in indices.windows(2) {
        if w[0] == w[1] {
            return Err(Error::InvalidConfiguration(format!("site {} occupied twice", w[0])));
        }
        if w[0] > w[1] {
            return Err(Error::InvalidConfiguration("indices must be ascending".into()));
        }
    }
    Ok(())
}

fn minor_determinant(a: &DMatrix<Complex64>, rows: &[usize], cols: &[usize]) -> Complex64 {
    let m = rows.len();
    if m == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let sub = DMatrix::from_fn(m, m, |i, j| a[(rows[i] - 1, cols[j] - 1)]);
    sub.determinant()
}

/// Amplitude `det[A_{p_a r_b}]` from the configuration `sources` (1-based,
/// ascending) to `targets`.
pub fn slater_amplitude(prop: &Propagator, sources: &[usize], targets: &[usize]) -> Result<Complex64> {
    if sources.len() != targets.len() {
        return Err(Error::Arity { sources: sources.len(), targets: targets.len() });
    }
    if sources.is_empty() {
        return Err(Error::InvalidConfiguration("empty configuration".into()));
    }
    let n = prop.n();
    check_configuration(sources, n)?;
    check_configuration(targets, n)?;
    Ok(minor_determinant(prop.amplitudes(), sources, targets))
}

/// Operator `Σ c_{pq} |p⟩⟨q|` on Z-basis states. Bitstrings read left to
/// right from site 1, `1` marking an excitation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ZBasisOperator {
    n: usize,
    entries: BTreeMap<(u32, u32), Complex64>,
}

impl ZBasisOperator {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_MIXED_N {
            return Err(Error::InvalidDimension(format!(
                "n = {n}, supported range 1..={MAX_MIXED_N}"
            )));
        }
        Ok(Self { n, entries: BTreeMap::new() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn parse_bits(&self, s: &str) -> Result<u32> {
        if s.chars().count() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: s.chars().count() });
        }
        let mut v = 0u32;
        for c in s.chars() {
            v = (v << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    other => {
                        return Err(Error::InvalidConfiguration(format!(
                            "bitstring character {other:?}"
                        )))
                    }
                };
        }
        Ok(v)
    }

    /// Adds `c·|ket⟩⟨bra|`.
    pub fn add(&mut self, ket: &str, bra: &str, c: Complex64) -> Result<()> {
        let k = self.parse_bits(ket)?;
        let b = self.parse_bits(bra)?;
        *self.entries.entry((k, b)).or_default() += c;
        Ok(())
    }

    /// Adds `c·|ket⟩⟨bra|` with site 1 as the most significant of `n` bits.
    pub fn add_bits(&mut self, ket: u32, bra: u32, c: Complex64) -> Result<()> {
        let limit = 1u32 << self.n;
        for v in [ket, bra] {
            if v >= limit {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: (32 - v.leading_zeros()) as usize,
                });
            }
        }
        *self.entries.entry((ket, bra)).or_default() += c;
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, Complex64)> + '_ {
        self.entries.iter().map(|(&(k, b), &c)| (k, b, c))
    }

    fn sites(&self, bits: u32) -> Vec<usize> {
        (1..=self.n).filter(|&site| bits >> (self.n - site) & 1 == 1).collect()
    }
}

/// `Tr[U a U† b]` under the xx model,
/// `Σ a_{pq} b_{sr} det A[p, r] · conj(det A[q, s])`.
pub fn mixed_state_overlap(prop: &Propagator, a: &ZBasisOperator, b: &ZBasisOperator) -> Result<Complex64> {
    let n = prop.n();
    for op in [a, b] {
        if op.n != n {
            return Err(Error::DimensionMismatch { expected: n, found: op.n });
        }
    }
    let mut cache: HashMap<(u32, u32), Complex64> = HashMap::new();
    let mut amplitude = |from: u32, to: u32| -> Complex64 {
        *cache.entry((from, to)).or_insert_with(|| {
            let rows = a.sites(from);
            let cols = a.sites(to);
            minor_determinant(prop.amplitudes(), &rows, &cols)
        })
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, q, apq) in a.entries() {
        for (s, r, bsr) in b.entries() {
            if p.count_ones() != r.count_ones() || q.count_ones() != s.count_ones() {
                continue;
            }
            acc += apq * bsr * amplitude(p, r) * amplitude(q, s).conj();
        }
    }
    Ok(acc)
}
