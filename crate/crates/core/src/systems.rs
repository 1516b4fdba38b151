//! Base Cantor minimal systems and their stationary Bratteli–Vershik
//! presentations.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;

use crate::algebra::perron::is_primitive;
use crate::algebra::IntMatrix;
use crate::error::{Error, Result};

/// Default bound `N` for the complexity test `p(n) ≥ n + 1, n ≤ N`.
pub const APERIODICITY_BOUND: usize = 12;

/// Substitution on a finite ordered alphabet. Words are stored as letter
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    alphabet: Vec<String>,
    rules: Vec<Vec<usize>>,
}

impl Substitution {
    /// `rules[i]` is the image of `alphabet[i]`. Only structural checks are
    /// made here; see [`Substitution::validate`].
    pub fn new(alphabet: Vec<String>, rules: Vec<Vec<String>>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::InvalidInput("empty alphabet".into()));
        }
        let distinct: BTreeSet<&String> = alphabet.iter().collect();
        if distinct.len() != alphabet.len() {
            return Err(Error::InvalidInput("repeated alphabet symbol".into()));
        }
        if rules.len() != alphabet.len() {
            return Err(Error::InvalidInput(format!(
                "{} rules for {} symbols",
                rules.len(),
                alphabet.len()
            )));
        }
        let mut encoded = Vec::with_capacity(rules.len());
        for (sym, image) in alphabet.iter().zip(&rules) {
            if image.is_empty() {
                return Err(Error::InvalidInput(format!("empty image for {sym}")));
            }
            let word = image
                .iter()
                .map(|s| {
                    alphabet
                        .iter()
                        .position(|a| a == s)
                        .ok_or_else(|| Error::InvalidInput(format!("unknown symbol {s} in image of {sym}")))
                })
                .collect::<Result<Vec<_>>>()?;
            encoded.push(word);
        }
        Ok(Substitution { alphabet, rules: encoded })
    }

    /// Single-character symbols, e.g. `[("a", "ab"), ("b", "a")]`.
    pub fn from_strs(rules: &[(&str, &str)]) -> Result<Self> {
        let alphabet = rules.iter().map(|(a, _)| a.to_string()).collect();
        let images = rules
            .iter()
            .map(|(_, w)| w.chars().map(|c| c.to_string()).collect())
            .collect();
        Substitution::new(alphabet, images)
    }

    pub fn fibonacci() -> Self {
        Substitution::from_strs(&[("a", "ab"), ("b", "a")]).expect("valid rules")
    }

    pub fn thue_morse() -> Self {
        Substitution::from_strs(&[("a", "ab"), ("b", "ba")]).expect("valid rules")
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn rules(&self) -> &[Vec<usize>] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    /// Encodes a word given as symbols.
    pub fn encode(&self, word: &[String]) -> Result<Vec<usize>> {
        word.iter()
            .map(|s| {
                self.alphabet
                    .iter()
                    .position(|a| a == s)
                    .ok_or_else(|| Error::IllegalWord(format!("unknown symbol {s}")))
            })
            .collect()
    }

    /// Splits a word into symbols: characters when all symbols are single
    /// characters, whitespace-separated tokens otherwise.
    pub fn parse_word(&self, word: &str) -> Result<Vec<usize>> {
        let tokens: Vec<String> = if self.alphabet.iter().all(|a| a.chars().count() == 1) {
            word.chars().filter(|c| !c.is_whitespace()).map(|c| c.to_string()).collect()
        } else {
            word.split_whitespace().map(str::to_string).collect()
        };
        self.encode(&tokens)
    }

    pub fn apply(&self, word: &[usize]) -> Vec<usize> {
        word.iter().flat_map(|&a| self.rules[a].iter().copied()).collect()
    }

    /// `incidence[i][j]` = occurrences of letter `i` in the image of `j`.
    pub fn incidence(&self) -> IntMatrix {
        let k = self.len();
        let mut m = IntMatrix::zeros(k, k);
        for (j, image) in self.rules.iter().enumerate() {
            for &i in image {
                m[(i, j)] += 1;
            }
        }
        m
    }

    /// Primitivity plus the complexity test up to `bound`.
    pub fn validate(&self, bound: usize) -> Result<()> {
        if !is_primitive(&self.incidence())? {
            return Err(Error::NotPrimitive);
        }
        for n in 1..=bound {
            let count = factor_complexity(self, n);
            if count < n + 1 {
                return Err(Error::AperiodicityCheckFailed { n, count });
            }
        }
        Ok(())
    }
}

/// Odometer with a periodic cycle of digit bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Odometer {
    base_cycle: Vec<u64>,
}

impl Odometer {
    pub fn new(base_cycle: Vec<u64>) -> Result<Self> {
        if base_cycle.is_empty() {
            return Err(Error::InvalidInput("empty base cycle".into()));
        }
        if let Some(&b) = base_cycle.iter().find(|&&b| b < 2) {
            return Err(Error::DegenerateBase(b));
        }
        Ok(Odometer { base_cycle })
    }

    pub fn base_cycle(&self) -> &[u64] {
        &self.base_cycle
    }

    /// Product of the bases over one period.
    pub fn period_product(&self) -> BigInt {
        self.base_cycle.iter().map(|&b| BigInt::from(b)).product()
    }
}

/// Marker for the one-point system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointSystem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseSystem {
    Substitution(Substitution),
    Odometer(Odometer),
    Point(PointSystem),
}

impl BaseSystem {
    pub fn to_diagram(&self) -> Result<StationaryBVDiagram> {
        match self {
            BaseSystem::Substitution(s) => substitution_to_bv(s),
            BaseSystem::Odometer(o) => odometer_to_bv(o),
            BaseSystem::Point(_) => Ok(point_to_bv()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            BaseSystem::Substitution(_) => "substitution",
            BaseSystem::Odometer(_) => "odometer",
            BaseSystem::Point(_) => "point",
        }
    }
}

/// Stationary Bratteli–Vershik diagram: one primitive incidence matrix
/// repeated at every level, plus the level-0 class of the constant 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationaryBVDiagram {
    incidence: IntMatrix,
    unit_vec: Vec<BigInt>,
}

impl StationaryBVDiagram {
    pub fn new(incidence: IntMatrix, unit_vec: Vec<BigInt>) -> Result<Self> {
        if !incidence.is_square() {
            return Err(Error::NotSquare(incidence.rows(), incidence.cols()));
        }
        if unit_vec.len() != incidence.rows() {
            return Err(Error::DimensionMismatch { expected: incidence.rows(), got: unit_vec.len() });
        }
        if unit_vec.iter().any(|x| x < &BigInt::one()) {
            return Err(Error::InvalidInput("unit vector entries must be at least 1".into()));
        }
        if !is_primitive(&incidence)? {
            return Err(Error::NotPrimitive);
        }
        Ok(StationaryBVDiagram { incidence, unit_vec })
    }

    pub fn k(&self) -> usize {
        self.incidence.rows()
    }

    pub fn incidence(&self) -> &IntMatrix {
        &self.incidence
    }

    pub fn unit_vec(&self) -> &[BigInt] {
        &self.unit_vec
    }
}

pub fn substitution_to_bv(s: &Substitution) -> Result<StationaryBVDiagram> {
    s.validate(APERIODICITY_BOUND)?;
    StationaryBVDiagram::new(s.incidence(), vec![BigInt::one(); s.len()])
}

/// Multi-base cycles are telescoped to the product over one period.
pub fn odometer_to_bv(o: &Odometer) -> Result<StationaryBVDiagram> {
    let o = Odometer::new(o.base_cycle.clone())?;
    StationaryBVDiagram::new(IntMatrix::diagonal(&[o.period_product()]), vec![BigInt::one()])
}

/// The one-point system: `Z` with the identity connecting map.
pub fn point_to_bv() -> StationaryBVDiagram {
    StationaryBVDiagram { incidence: IntMatrix::identity(1), unit_vec: vec![BigInt::one()] }
}

pub fn check_primitive(m: &IntMatrix) -> Result<bool> {
    is_primitive(m)
}

/// Number of distinct length-`n` factors of the substitution subshift.
pub fn factor_complexity(s: &Substitution, n: usize) -> usize {
    factors(s, n).len()
}

/// Length-`n` factors of the subshift of a primitive substitution.
///
/// Every length-2 factor is found by closing the factors of the one-letter
/// images under the substitution. Once every `σ^m(a)` has length at least
/// `n`, each length-`n` factor sits inside some `σ^m(x)σ^m(y)` with `xy`
/// legal, so those blocks enumerate the language exactly.
pub fn factors(s: &Substitution, n: usize) -> BTreeSet<Vec<usize>> {
    if n == 0 {
        return BTreeSet::from([Vec::new()]);
    }
    let pairs = two_factors(s);
    let mut blocks: Vec<Vec<usize>> = (0..s.len()).map(|a| vec![a]).collect();
    // Non-growing letters can only occur for non-primitive input.
    for _ in 0..64 {
        if blocks.iter().all(|b| b.len() >= n) {
            break;
        }
        blocks = blocks.iter().map(|b| s.apply(b)).collect();
    }
    let mut out = BTreeSet::new();
    for b in &blocks {
        windows_into(b, n, &mut out);
    }
    for &(x, y) in &pairs {
        let joined: Vec<usize> = blocks[x].iter().chain(&blocks[y]).copied().collect();
        windows_into(&joined, n, &mut out);
    }
    out
}

fn windows_into(word: &[usize], n: usize, out: &mut BTreeSet<Vec<usize>>) {
    if word.len() >= n {
        out.extend(word.windows(n).map(<[usize]>::to_vec));
    }
}

fn two_factors(s: &Substitution) -> BTreeSet<(usize, usize)> {
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for image in &s.rules {
        pairs.extend(image.windows(2).map(|w| (w[0], w[1])));
    }
    loop {
        let mut next = pairs.clone();
        for &(x, y) in &pairs {
            let w: Vec<usize> = s.rules[x].iter().chain(&s.rules[y]).copied().collect();
            next.extend(w.windows(2).map(|w| (w[0], w[1])));
        }
        if next.len() == pairs.len() {
            return pairs;
        }
        pairs = next;
    }
}

/// Whether `word` occurs in the subshift.
pub fn is_legal(s: &Substitution, word: &[usize]) -> bool {
    word.is_empty() || factors(s, word.len()).contains(word)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn fibonacci_and_thue_morse_diagrams() {
        let d = substitution_to_bv(&Substitution::fibonacci()).unwrap();
        assert_eq!(d.incidence(), &m(&[vec![1, 1], vec![1, 0]]));
        assert_eq!(d.unit_vec(), &[BigInt::one(), BigInt::one()]);
        let d = substitution_to_bv(&Substitution::thue_morse()).unwrap();
        assert_eq!(d.incidence(), &m(&[vec![1, 1], vec![1, 1]]));
    }

    #[test]
    fn non_primitive_substitution() {
        let s = Substitution::from_strs(&[("a", "a"), ("b", "ab")]).unwrap();
        assert_eq!(substitution_to_bv(&s).unwrap_err(), Error::NotPrimitive);
    }

    #[test]
    fn periodic_substitution_fails_complexity() {
        // a→ab, b→ab generates the periodic point (ab)^∞
        let s = Substitution::from_strs(&[("a", "ab"), ("b", "ab")]).unwrap();
        assert!(matches!(substitution_to_bv(&s), Err(Error::AperiodicityCheckFailed { n: 2, count: 2 })));
    }

    #[test]
    fn odometers() {
        let d = odometer_to_bv(&Odometer::new(vec![2]).unwrap()).unwrap();
        assert_eq!(d.incidence(), &m(&[vec![2]]));
        let d = odometer_to_bv(&Odometer::new(vec![2, 3]).unwrap()).unwrap();
        assert_eq!(d.incidence(), &m(&[vec![6]]));
        assert_eq!(Odometer::new(vec![1]).unwrap_err(), Error::DegenerateBase(1));
    }

    #[test]
    fn primitivity_examples() {
        assert!(check_primitive(&m(&[vec![1, 1], vec![1, 0]])).unwrap());
        assert!(!check_primitive(&IntMatrix::identity(2)).unwrap());
        assert!(check_primitive(&m(&[vec![2]])).unwrap());
        assert_eq!(check_primitive(&m(&[vec![1, 1]])).unwrap_err(), Error::NotSquare(1, 2));
    }

    /// Brute-force oracle: factors of a long iterate of the first letter.
    fn oracle_factors(s: &Substitution, n: usize) -> BTreeSet<Vec<usize>> {
        let mut w = vec![0];
        while w.len() < 4000 {
            w = s.apply(&w);
        }
        w.windows(n).map(<[usize]>::to_vec).collect()
    }

    #[test]
    fn complexity_examples() {
        let fib = Substitution::fibonacci();
        assert_eq!(factor_complexity(&fib, 1), 2);
        assert_eq!(factor_complexity(&fib, 3), 4);
        for n in 1..=15 {
            assert_eq!(factor_complexity(&fib, n), n + 1);
        }
        let tm = Substitution::thue_morse();
        assert_eq!(factor_complexity(&tm, 2), 4);
        for s in [fib, tm, Substitution::from_strs(&[("a", "abc"), ("b", "ac"), ("c", "b")]).unwrap()] {
            for n in 1..=10 {
                assert_eq!(factors(&s, n), oracle_factors(&s, n), "n = {n}");
            }
        }
    }

    #[test]
    fn legality() {
        let fib = Substitution::fibonacci();
        assert!(is_legal(&fib, &fib.parse_word("abaab").unwrap()));
        assert!(!is_legal(&fib, &fib.parse_word("bb").unwrap()));
        assert!(fib.parse_word("ac").is_err());
    }

    proptest::proptest! {
        #[test]
        fn complexity_nondecreasing_and_columns(rules in proptest::collection::vec(proptest::collection::vec(0usize..3, 1..4), 3)) {
            let alphabet: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
            let images = rules.iter().map(|w| w.iter().map(|&i| alphabet[i].clone()).collect()).collect();
            let s = Substitution::new(alphabet, images).unwrap();
            let inc = s.incidence();
            for j in 0..3 {
                let col: BigInt = inc.column(j).iter().sum();
                proptest::prop_assert_eq!(col, BigInt::from(s.rules()[j].len()));
            }
            proptest::prop_assert_eq!(check_primitive(&inc).unwrap(), check_primitive(&inc.transpose()).unwrap());
            if check_primitive(&inc).unwrap() {
                proptest::prop_assert_eq!(factor_complexity(&s, 1), 3);
                let counts: Vec<usize> = (1..8).map(|n| factor_complexity(&s, n)).collect();
                proptest::prop_assert!(counts.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }
}
