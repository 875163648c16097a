//! Pauli strings and real-weighted sums of them.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' | 'i' | '1' => Ok(Pauli::I),
            'X' | 'x' => Ok(Pauli::X),
            'Y' | 'y' => Ok(Pauli::Y),
            'Z' | 'z' => Ok(Pauli::Z),
            other => Err(Error::BadPauliLetter(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// `self · other = phase · result`.
    pub fn mul(self, other: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        match (self, other) {
            (I, p) | (p, I) => (one, p),
            (X, X) | (Y, Y) | (Z, Z) => (one, I),
            (X, Y) => (i, Z),
            (Y, X) => (-i, Z),
            (Y, Z) => (i, X),
            (Z, Y) => (-i, X),
            (Z, X) => (i, Y),
            (X, Z) => (-i, Y),
        }
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }
}

/// Tensor product of single-site Paulis; index 0 is site 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters }
    }

    pub fn identity(n: usize) -> Self {
        Self { letters: vec![Pauli::I; n] }
    }

    /// Parses a string such as `"XZIY"`; its length fixes `n`.
    pub fn parse(s: &str) -> Result<Self> {
        let letters = s.chars().map(Pauli::from_char).collect::<Result<Vec<_>>>()?;
        Ok(Self { letters })
    }

    /// String with the given letters on 1-based sites and identity elsewhere.
    pub fn from_sites(n: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut letters = vec![Pauli::I; n];
        for &(site, p) in sites {
            if site == 0 || site > n {
                return Err(Error::IndexOutOfRange { index: site, n });
            }
            letters[site - 1] = p;
        }
        Ok(Self { letters })
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    /// Letter at 1-based `site`.
    pub fn get(&self, site: usize) -> Pauli {
        self.letters[site - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// `self · other = phase · result`.
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        assert_eq!(self.n(), other.n(), "Pauli strings of different length");
        let mut phase = Complex64::new(1.0, 0.0);
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (ph, p) = a.mul(b);
                phase *= ph;
                p
            })
            .collect();
        (phase, PauliString { letters })
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let flips = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| a.anticommutes(**b))
            .count();
        flips % 2 == 0
    }

    /// Number of X and Y letters; bounds the coherence order of the string.
    pub fn flip_count(&self) -> usize {
        self.letters.iter().filter(|&&p| matches!(p, Pauli::X | Pauli::Y)).count()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// Real-weighted sum of Pauli strings on `n` sites. Strings are unique; the
/// identity string is allowed (see [`DeviationState`] for the traceless case).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(PauliString, f64)>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (PauliString, f64)>) -> Result<Self> {
        let mut sum = Self::zero(n);
        for (s, w) in terms {
            sum.add(s, w)?;
        }
        Ok(sum)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(PauliString, f64)] {
        &self.terms
    }

    /// Adds `w·s`, merging with an existing term on the same string.
    pub fn add(&mut self, s: PauliString, w: f64) -> Result<()> {
        if s.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: s.n() });
        }
        if !w.is_finite() {
            return Err(Error::InvalidParameter(format!("weight {w} on {s}")));
        }
        match self.terms.iter_mut().find(|(t, _)| *t == s) {
            Some((_, existing)) => *existing += w,
            None => self.terms.push((s, w)),
        }
        Ok(())
    }

    /// Drops terms whose weight magnitude is at most `tol`.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.terms.retain(|(_, w)| w.abs() > tol);
        self
    }

    pub fn identity_weight(&self) -> f64 {
        self.terms.iter().filter(|(s, _)| s.is_identity()).map(|(_, w)| w).sum()
    }

    /// `Tr[self²]/2^n`.
    pub fn purity(&self) -> f64 {
        self.terms.iter().map(|(_, w)| w * w).sum()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self { n: self.n, terms: self.terms.iter().map(|(s, w)| (s.clone(), w * k)).collect() }
    }

    /// `Q·self·Q` for a Pauli string `Q`: anticommuting terms flip sign.
    pub fn conjugated_by(&self, q: &PauliString) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(s, w)| (s.clone(), if s.commutes_with(q) { *w } else { -*w }))
            .collect();
        Self { n: self.n, terms }
    }

    /// `R·self·R†` with `R = exp(−iφ Σσ_z/2)`, so that `X → cos φ X + sin φ Y`
    /// and `Y → cos φ Y − sin φ X` on every site.
    pub fn rotated_z(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let mut out = Self::zero(self.n);
        for (string, w) in &self.terms {
            let mut partial: Vec<(Vec<Pauli>, f64)> = vec![(Vec::with_capacity(self.n), *w)];
            for &p in string.letters() {
                let images = match p {
                    Pauli::X => vec![(Pauli::X, c), (Pauli::Y, s)],
                    Pauli::Y => vec![(Pauli::Y, c), (Pauli::X, -s)],
                    other => vec![(other, 1.0)],
                };
                let mut next = Vec::with_capacity(partial.len() * images.len());
                for (prefix, pw) in &partial {
                    for &(q, qw) in &images {
                        let mut v = prefix.clone();
                        v.push(q);
                        next.push((v, pw * qw));
                    }
                }
                partial = next;
            }
            for (letters, pw) in partial {
                out.add(PauliString::new(letters), pw).expect("same length");
            }
        }
        out
    }
}

/// Traceless deviation operator `δρ`, stored as a [`PauliSum`] with no
/// identity component.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationState(PauliSum);

impl DeviationState {
    pub fn new(sum: PauliSum) -> Result<Self> {
        if sum.terms.iter().any(|(s, w)| s.is_identity() && *w != 0.0) {
            return Err(Error::InvalidParameter("deviation state has a trace".into()));
        }
        let mut sum = sum;
        sum.terms.retain(|(s, _)| !s.is_identity());
        Ok(Self(sum))
    }

    /// `δρ_z^j`, a single `σ_z` on 1-based site `j`.
    pub fn z_at(n: usize, j: usize) -> Result<Self> {
        let s = PauliString::from_sites(n, &[(j, Pauli::Z)])?;
        Ok(Self(PauliSum { n, terms: vec![(s, 1.0)] }))
    }

    pub fn as_sum(&self) -> &PauliSum {
        &self.0
    }

    pub fn into_sum(self) -> PauliSum {
        self.0
    }
}

impl std::ops::Deref for DeviationState {
    type Target = PauliSum;

    fn deref(&self) -> &PauliSum {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn letter() -> impl Strategy<Value = Pauli> {
        prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
    }

    #[test]
    fn single_site_products() {
        assert_eq!(Pauli::X.mul(Pauli::Y), (Complex64::i(), Pauli::Z));
        assert_eq!(Pauli::Z.mul(Pauli::X), (Complex64::i(), Pauli::Y));
        assert_eq!(Pauli::Y.mul(Pauli::Y).1, Pauli::I);
    }

    #[test]
    fn parse_and_display() {
        let s = PauliString::parse("XIzY").unwrap();
        assert_eq!(s.to_string(), "XIZY");
        assert_eq!(s.weight(), 3);
        assert!(matches!(PauliString::parse("XQ"), Err(Error::BadPauliLetter('Q'))));
        assert!(PauliString::from_sites(3, &[(4, Pauli::X)]).is_err());
    }

    #[test]
    fn deviation_rejects_trace() {
        let n = 2;
        let mut sum = PauliSum::zero(n);
        sum.add(PauliString::identity(n), 0.5).unwrap();
        assert!(DeviationState::new(sum).is_err());
        let z = DeviationState::z_at(3, 2).unwrap();
        assert_eq!(z.terms()[0].0.to_string(), "IZI");
    }

    #[test]
    fn rotation_by_quarter_turn_maps_x_to_y() {
        let sum = PauliSum::from_terms(1, [(PauliString::parse("X").unwrap(), 1.0)]).unwrap();
        let r = sum.rotated_z(std::f64::consts::FRAC_PI_2).pruned(1e-15);
        assert_eq!(r.terms().len(), 1);
        assert_eq!(r.terms()[0].0.to_string(), "Y");
        assert!((r.terms()[0].1 - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn commutation_matches_product_order(a in proptest::collection::vec(letter(), 1..7),
                                              seed in proptest::collection::vec(letter(), 7)) {
            let b: Vec<Pauli> = seed[..a.len()].to_vec();
            let pa = PauliString::new(a);
            let pb = PauliString::new(b);
            let (ph_ab, s_ab) = pa.mul(&pb);
            let (ph_ba, s_ba) = pb.mul(&pa);
            prop_assert_eq!(&s_ab, &s_ba);
            let same = (ph_ab - ph_ba).norm() < 1e-12;
            prop_assert_eq!(same, pa.commutes_with(&pb));
        }

        #[test]
        fn rotation_preserves_purity(letters in proptest::collection::vec(letter(), 1..6),
                                     w in -2.0f64..2.0, phi in -3.0f64..3.0) {
            let n = letters.len();
            let sum = PauliSum::from_terms(n, [(PauliString::new(letters), w)]).unwrap();
            let rotated = sum.rotated_z(phi);
            prop_assert!((rotated.purity() - sum.purity()).abs() < 1e-12);
        }
    }
}
