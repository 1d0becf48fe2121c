//! Phase-free Pauli strings and real-coefficient Pauli sums.
//!
//! A [`PauliString`] stores its letters as two bitmasks in symplectic form.
//! Letter `i` (counting from the left of the printed string) lives at bit
//! `n - 1 - i`, so the masks line up with computational-basis indices of the
//! dense backend (leftmost letter = most significant qubit).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported qubit count for the bitmask representation.
pub const MAX_QUBITS: usize = 64;

/// Coefficients whose magnitude falls below this after arithmetic are dropped.
pub const DROP_TOLERANCE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidLetter(other)),
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

    /// `(x, z)` symplectic bits; Y carries both.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidQubitCount { n, max: MAX_QUBITS });
    }
    Ok(())
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(Self { n, x: 0, z: 0 })
    }

    pub fn new(letters: &[Pauli]) -> Result<Self> {
        let n = letters.len();
        check_qubits(n)?;
        let mut out = Self { n, x: 0, z: 0 };
        for (i, &p) in letters.iter().enumerate() {
            out.set(i, p);
        }
        Ok(out)
    }

    /// Builds a string from raw masks; bits above `n` are rejected.
    pub fn from_masks(n: usize, x: u64, z: u64) -> Result<Self> {
        check_qubits(n)?;
        let mask = full_mask(n);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::InvalidParameter(format!(
                "mask bits beyond {n} qubits"
            )));
        }
        Ok(Self { n, x, z })
    }

    /// A single non-identity letter at `site` (0 = leftmost).
    pub fn single(n: usize, site: usize, letter: Pauli) -> Result<Self> {
        let mut out = Self::identity(n)?;
        if site >= n {
            return Err(Error::InvalidParameter(format!(
                "site {site} out of range for {n} qubits"
            )));
        }
        out.set(site, letter);
        Ok(out)
    }

    fn bit(&self, site: usize) -> u64 {
        1u64 << (self.n - 1 - site)
    }

    fn set(&mut self, site: usize, p: Pauli) {
        let b = self.bit(site);
        let (x, z) = p.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Bitmask of sites carrying a non-identity letter.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn letter(&self, site: usize) -> Pauli {
        let b = self.bit(site);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn letters(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.n).map(move |i| self.letter(i))
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    /// True when every letter is I or Z.
    pub fn is_z_diagonal(&self) -> bool {
        self.x == 0
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Commutation from the parity of per-site anticommutations.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        ((self.x & other.z) ^ (self.z & other.x))
            .count_ones()
            .is_multiple_of(2)
    }

    /// Product with the global phase discarded.
    pub fn mul_phase_free(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.letters() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(Pauli::from_char)
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(&letters)
    }
}

/// Traceless Hermitian operator as a sparse real combination of Pauli strings.
#[derive(Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl PauliSum {
    /// The zero operator on `n` qubits.
    pub fn new(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(Self {
            n,
            terms: BTreeMap::new(),
        })
    }

    /// Sums duplicate strings; identity strings are rejected.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        let mut out = Self::new(n)?;
        for (p, c) in terms {
            out.add_term(p, c)?;
        }
        Ok(out)
    }

    /// Convenience constructor from `(coefficient, letters)` pairs.
    pub fn from_labels(terms: &[(f64, &str)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("no terms to infer qubit count".into()))?;
        let n = first.1.len();
        let mut out = Self::new(n)?;
        for &(c, label) in terms {
            out.add_term(label.parse()?, c)?;
        }
        Ok(out)
    }

    pub fn add_term(&mut self, p: PauliString, coefficient: f64) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: p.num_qubits(),
            });
        }
        if p.is_identity() {
            return Err(Error::IdentityTerm);
        }
        if !coefficient.is_finite() {
            return Err(Error::NonFiniteCoefficient(coefficient));
        }
        let updated = self.terms.get(&p).copied().unwrap_or(0.0) + coefficient;
        if updated.abs() < DROP_TOLERANCE {
            self.terms.remove(&p);
        } else {
            self.terms.insert(p, updated);
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &PauliString) -> f64 {
        self.terms.get(p).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, f64)> + '_ {
        self.terms.iter().map(|(p, &c)| (p, c))
    }

    fn check_len(&self, other: usize) -> Result<()> {
        if self.n != other {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: other,
            });
        }
        Ok(())
    }

    /// Normalized Frobenius norm, i.e. the l2 norm of the coefficients.
    pub fn frobenius_norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_weight(&self) -> usize {
        self.terms
            .keys()
            .map(PauliString::weight)
            .max()
            .unwrap_or(0)
    }

    pub fn is_k_local(&self, k: usize) -> bool {
        self.max_weight() <= k
    }

    pub fn ensure_k_local(&self, k: usize) -> Result<()> {
        let weight = self.max_weight();
        if weight > k {
            return Err(Error::NotKLocal { k, weight });
        }
        Ok(())
    }

    pub fn is_z_diagonal(&self) -> bool {
        self.terms.keys().all(PauliString::is_z_diagonal)
    }

    fn combine(&self, other: &PauliSum, sign: f64) -> Result<PauliSum> {
        self.check_len(other.n)?;
        let mut out = self.clone();
        for (p, c) in other.iter() {
            out.add_term(*p, sign * c)?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.combine(other, 1.0)
    }

    pub fn subtract(&self, other: &PauliSum) -> Result<PauliSum> {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, factor: f64) -> Result<PauliSum> {
        if !factor.is_finite() {
            return Err(Error::NonFiniteCoefficient(factor));
        }
        Self::from_terms(self.n, self.iter().map(|(p, c)| (*p, factor * c)))
    }

    /// `P H P`: terms anticommuting with `p` flip sign.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliSum> {
        self.check_len(p.num_qubits())?;
        let terms = self
            .terms
            .iter()
            .map(|(q, &c)| (*q, if p.commutes_unchecked(q) { c } else { -c }))
            .collect();
        Ok(PauliSum { n: self.n, terms })
    }

    /// Keeps only the terms for which `keep` holds.
    pub fn filter<F>(&self, mut keep: F) -> PauliSum
    where
        F: FnMut(&PauliString) -> bool,
    {
        let terms = self
            .terms
            .iter()
            .filter(|(p, _)| keep(p))
            .map(|(p, &c)| (*p, c))
            .collect();
        PauliSum { n: self.n, terms }
    }

    /// Parses the one-term-per-line text format (`0.5 XIZ`, `#` comments).
    pub fn parse_text(text: &str) -> Result<PauliSum> {
        let mut parsed: Vec<(usize, f64, PauliString)> = Vec::new();
        let mut n: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let mut fields = line.split_whitespace();
            let (Some(coef), Some(label), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(err(format!(
                    "expected `<coefficient> <letters>`, got {line:?}"
                )));
            };
            let c: f64 = coef
                .parse()
                .map_err(|_| err(format!("malformed coefficient {coef:?}")))?;
            if !c.is_finite() {
                return Err(err(format!("coefficient {coef:?} is not finite")));
            }
            let p: PauliString = label.parse().map_err(|e| err(format!("{e}")))?;
            match n {
                None => n = Some(p.num_qubits()),
                Some(n0) if n0 != p.num_qubits() => {
                    return Err(err(format!(
                        "string {label} has {} letters, expected {n0}",
                        p.num_qubits()
                    )))
                }
                _ => {}
            }
            if p.is_identity() {
                return Err(err("identity term is not allowed".into()));
            }
            parsed.push((line_no, c, p));
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            message: "no terms; the qubit count cannot be inferred".into(),
        })?;
        let mut out = PauliSum::new(n)?;
        for (line, c, p) in parsed {
            out.add_term(p, c).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(out)
    }

    /// Inverse of [`PauliSum::parse_text`]; the zero operator prints nothing.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (p, c) in self.iter() {
            s.push_str(&format!("{c} {p}\n"));
        }
        s
    }
}

impl fmt::Debug for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "PauliSum(n={}, 0)", self.n);
        }
        write!(f, "PauliSum(n={}, ", self.n)?;
        for (i, (p, c)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·{p}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PauliSum::parse_text(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn weights() {
        assert_eq!(ps("III").weight(), 0);
        assert_eq!(ps("XIZ").weight(), 2);
        assert_eq!(ps("YYY").weight(), 3);
    }

    #[test]
    fn letters_round_trip_through_masks() {
        let p = ps("XYZI");
        assert_eq!(p.to_string(), "XYZI");
        assert_eq!(p.letter(0), Pauli::X);
        assert_eq!(p.x_mask(), 0b1100);
        assert_eq!(p.z_mask(), 0b0110);
    }

    #[test]
    fn commutation_examples() {
        assert!(!ps("X").commutes(&ps("Z")).unwrap());
        assert!(ps("XI").commutes(&ps("IZ")).unwrap());
        assert!(ps("XY").commutes(&ps("YX")).unwrap());
        assert!(matches!(
            ps("X").commutes(&ps("XX")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn conjugation_examples() {
        let h = PauliSum::from_labels(&[(0.7, "X")]).unwrap();
        let c = h.conjugate(&ps("Z")).unwrap();
        assert_eq!(c.coefficient(&ps("X")), -0.7);
        assert_eq!(h.conjugate(&ps("I")).unwrap(), h);

        let h = PauliSum::from_labels(&[(0.3, "XZ"), (0.4, "ZZ")]).unwrap();
        let c = h.conjugate(&ps("ZI")).unwrap();
        assert_eq!(c.coefficient(&ps("XZ")), -0.3);
        assert_eq!(c.coefficient(&ps("ZZ")), 0.4);
    }

    #[test]
    fn norms_and_subtraction() {
        let h = PauliSum::from_labels(&[(0.6, "X"), (0.8, "Z")]).unwrap();
        assert!((h.frobenius_norm() - 1.0).abs() < 1e-15);
        assert_eq!(PauliSum::new(3).unwrap().frobenius_norm(), 0.0);

        assert!(h.subtract(&h).unwrap().is_empty());

        let eps = 0.25;
        let a = PauliSum::from_labels(&[(eps, "X")]).unwrap();
        let b = PauliSum::from_labels(&[(-eps, "X")]).unwrap();
        let d = a.subtract(&b).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.coefficient(&ps("X")), 2.0 * eps);

        let a = PauliSum::from_labels(&[(0.3, "XZ"), (0.2, "ZZ")]).unwrap();
        let b = PauliSum::from_labels(&[(0.2, "ZZ")]).unwrap();
        let d = a.subtract(&b).unwrap();
        assert_eq!(d, PauliSum::from_labels(&[(0.3, "XZ")]).unwrap());
    }

    #[test]
    fn locality() {
        let h = PauliSum::from_labels(&[(1.0, "XX"), (1.0, "ZI")]).unwrap();
        assert!(h.is_k_local(2));
        let h = PauliSum::from_labels(&[(1.0, "XYZ")]).unwrap();
        assert!(!h.is_k_local(2));
        assert!(h.ensure_k_local(2).is_err());
        assert!(PauliSum::new(2).unwrap().is_k_local(0));
    }

    #[test]
    fn identity_and_nonfinite_rejected() {
        let mut h = PauliSum::new(2).unwrap();
        assert_eq!(h.add_term(ps("II"), 1.0), Err(Error::IdentityTerm));
        assert!(matches!(
            h.add_term(ps("XI"), f64::NAN),
            Err(Error::NonFiniteCoefficient(_))
        ));
        assert!(h.add_term(ps("X"), 1.0).is_err());
    }

    #[test]
    fn tiny_coefficients_dropped() {
        let mut h = PauliSum::new(1).unwrap();
        h.add_term(ps("X"), 0.1).unwrap();
        h.add_term(ps("X"), -0.1 + 1e-16).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn text_format() {
        let text = "# header\n0.5 XIZ\n\n-0.25 ZZI  # trailing\n0.5 XIZ\n";
        let h: PauliSum = text.parse().unwrap();
        assert_eq!(h.num_qubits(), 3);
        assert_eq!(h.coefficient(&ps("XIZ")), 1.0);
        assert_eq!(h.coefficient(&ps("ZZI")), -0.25);
        let again: PauliSum = h.to_text().parse().unwrap();
        assert_eq!(again, h);
    }

    #[test]
    fn text_format_errors_carry_line_numbers() {
        let err = PauliSum::parse_text("0.5 XI\nabc ZZ\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = PauliSum::parse_text("0.5 XI\n0.1 XYZ\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = PauliSum::parse_text("1 II\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = PauliSum::parse_text("1 XQ\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(PauliSum::parse_text("# nothing\n").is_err());
    }
}
