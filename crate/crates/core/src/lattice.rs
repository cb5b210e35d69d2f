//! Exact finitely additive measures on finite set algebras.
//!
//! A finite algebra over `n` atoms is generated by a partition of the atoms
//! into blocks; every algebra set is a union of blocks. Measures store one
//! exact rational per block, so every lattice identity in this module is an
//! equality test rather than a tolerance test.
//!
//! Where an operation has a closed form on finite algebras (total variation,
//! Jordan parts, outer measure) the closed form is what runs; the defining
//! sup/inf formulas are kept alongside as brute-force oracles.

use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact scalar used for every measure and function value.
pub type Rational = Rational64;

/// Default bound on the number of atoms of a ground set.
pub const DEFAULT_ATOM_LIMIT: usize = 12;

/// Hard bound imposed by the bitmask representation.
pub const MAX_ATOMS: usize = 32;

/// Default bound on the number of blocks the partition oracle enumerates
/// (Bell(5) = 52 partitions).
pub const PARTITION_ORACLE_LIMIT: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("ground set must contain at least one atom")]
    EmptyGroundSet,
    #[error("duplicate atom label `{0}`")]
    DuplicateAtom(String),
    #[error("unknown atom label `{0}`")]
    UnknownAtom(String),
    #[error("{n} atoms exceed the configured limit of {limit}")]
    TooManyAtoms { n: usize, limit: usize },
    #[error("blocks do not partition the ground set: {0}")]
    BadPartition(String),
    #[error("set splits a block of the algebra")]
    NotInAlgebra,
    #[error("{blocks} blocks exceed the exhaustive oracle bound of {limit}")]
    TooLarge { blocks: usize, limit: usize },
    #[error("outer measure requires a nonnegative measure")]
    NegativeMeasure,
    #[error("function is not constant on the blocks of the measure's algebra")]
    MeasurabilityMismatch,
    #[error("operands live on different algebras")]
    AlgebraMismatch,
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("ground sets of different size ({0} vs {1})")]
    GroundSetMismatch(usize, usize),
    #[error("tolerance must be positive")]
    NonPositiveTolerance,
    #[error("zero denominator in rational value")]
    ZeroDenominator,
}

pub type Result<T, E = LatticeError> = std::result::Result<T, E>;

/// Ordered, uniquely labelled atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    atoms: Vec<String>,
}

impl GroundSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::with_limit(labels, DEFAULT_ATOM_LIMIT)
    }

    pub fn with_limit<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        limit: usize,
    ) -> Result<Self> {
        let atoms: Vec<String> = labels.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(LatticeError::EmptyGroundSet);
        }
        let limit = limit.min(MAX_ATOMS);
        if atoms.len() > limit {
            return Err(LatticeError::TooManyAtoms {
                n: atoms.len(),
                limit,
            });
        }
        for (i, a) in atoms.iter().enumerate() {
            if atoms[..i].contains(a) {
                return Err(LatticeError::DuplicateAtom(a.clone()));
            }
        }
        Ok(Self { atoms })
    }

    /// Atoms labelled `a`, `b`, `c`, ...
    pub fn alphabetic(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| {
            let c = (b'a' + (i % 26) as u8) as char;
            if i < 26 {
                c.to_string()
            } else {
                format!("{c}{}", i / 26)
            }
        }))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.atoms
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.atoms
            .iter()
            .position(|a| a == label)
            .ok_or_else(|| LatticeError::UnknownAtom(label.to_string()))
    }

    pub fn set<S: AsRef<str>>(&self, labels: &[S]) -> Result<AlgebraSet> {
        let mut bits = 0u32;
        for l in labels {
            bits |= 1 << self.index_of(l.as_ref())?;
        }
        Ok(AlgebraSet::from_bits(self.len(), bits))
    }

    pub fn full(&self) -> AlgebraSet {
        AlgebraSet::full(self.len())
    }

    pub fn labels_of(&self, s: AlgebraSet) -> Vec<String> {
        s.atoms().map(|i| self.atoms[i].clone()).collect()
    }
}

/// A subset of the atoms, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgebraSet {
    bits: u32,
    n: u8,
}

impl AlgebraSet {
    fn mask(n: usize) -> u32 {
        if n >= 32 {
            u32::MAX
        } else {
            (1u32 << n) - 1
        }
    }

    pub fn empty(n: usize) -> Self {
        Self {
            bits: 0,
            n: n as u8,
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            bits: Self::mask(n),
            n: n as u8,
        }
    }

    /// Bits beyond `n` are dropped.
    pub fn from_bits(n: usize, bits: u32) -> Self {
        Self {
            bits: bits & Self::mask(n),
            n: n as u8,
        }
    }

    pub fn from_atoms(n: usize, atoms: impl IntoIterator<Item = usize>) -> Self {
        let bits = atoms.into_iter().fold(0u32, |acc, i| acc | (1 << i));
        Self::from_bits(n, bits)
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn universe_len(self) -> usize {
        self.n as usize
    }

    pub fn contains(self, atom: usize) -> bool {
        self.bits >> atom & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn count(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn union(self, other: Self) -> Self {
        Self::from_bits(self.n as usize, self.bits | other.bits)
    }

    pub fn intersection(self, other: Self) -> Self {
        Self::from_bits(self.n as usize, self.bits & other.bits)
    }

    pub fn difference(self, other: Self) -> Self {
        Self::from_bits(self.n as usize, self.bits & !other.bits)
    }

    pub fn complement(self) -> Self {
        Self::from_bits(self.n as usize, !self.bits)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn atoms(self) -> impl Iterator<Item = usize> {
        (0..self.n as usize).filter(move |&i| self.contains(i))
    }
}

impl fmt::Debug for AlgebraSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms()).finish()
    }
}

/// The algebra generated by a partition of the atoms into blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubAlgebra {
    n: usize,
    blocks: Vec<AlgebraSet>,
}

impl SubAlgebra {
    /// One block per atom: the power set.
    pub fn discrete(n: usize) -> Self {
        Self {
            n,
            blocks: (0..n).map(|i| AlgebraSet::from_atoms(n, [i])).collect(),
        }
    }

    /// `{∅, Ω}`.
    pub fn trivial(n: usize) -> Self {
        Self {
            n,
            blocks: vec![AlgebraSet::full(n)],
        }
    }

    pub fn from_blocks(n: usize, blocks: Vec<AlgebraSet>) -> Result<Self> {
        if n == 0 {
            return Err(LatticeError::EmptyGroundSet);
        }
        if n > MAX_ATOMS {
            return Err(LatticeError::TooManyAtoms {
                n,
                limit: MAX_ATOMS,
            });
        }
        let mut seen = AlgebraSet::empty(n);
        for b in &blocks {
            if b.universe_len() != n {
                return Err(LatticeError::GroundSetMismatch(n, b.universe_len()));
            }
            if b.is_empty() {
                return Err(LatticeError::BadPartition("empty block".into()));
            }
            if !b.intersection(seen).is_empty() {
                return Err(LatticeError::BadPartition(format!(
                    "block {b:?} overlaps an earlier block"
                )));
            }
            seen = seen.union(*b);
        }
        if seen != AlgebraSet::full(n) {
            return Err(LatticeError::BadPartition(format!(
                "atoms {:?} are not covered",
                seen.complement()
            )));
        }
        Ok(Self { n, blocks })
    }

    /// Block `i` of the result holds the atoms labelled `k` with `labels[k] == i`.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let n = labels.len();
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let blocks = (0..count)
            .map(|b| AlgebraSet::from_atoms(n, (0..n).filter(|&k| labels[k] == b)))
            .collect();
        Self::from_blocks(n, blocks)
    }

    pub fn universe_len(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[AlgebraSet] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn full(&self) -> AlgebraSet {
        AlgebraSet::full(self.n)
    }

    /// Index of the block holding `atom`.
    pub fn block_of(&self, atom: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(atom))
            .expect("blocks cover every atom")
    }

    pub fn contains(&self, s: AlgebraSet) -> bool {
        self.block_mask(s).is_ok()
    }

    /// Bitmask over block indices of the blocks making up `s`.
    pub fn block_mask(&self, s: AlgebraSet) -> Result<u32> {
        if s.universe_len() != self.n {
            return Err(LatticeError::GroundSetMismatch(self.n, s.universe_len()));
        }
        let mut mask = 0u32;
        for (i, b) in self.blocks.iter().enumerate() {
            let meet = b.intersection(s);
            if meet == *b {
                mask |= 1 << i;
            } else if !meet.is_empty() {
                return Err(LatticeError::NotInAlgebra);
            }
        }
        Ok(mask)
    }

    /// Union of the blocks selected by `mask`.
    pub fn set_of_blocks(&self, mask: u32) -> AlgebraSet {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(AlgebraSet::empty(self.n), |acc, (_, b)| acc.union(*b))
    }

    /// Every member of the algebra, `2^blocks` of them.
    pub fn sets(&self) -> impl Iterator<Item = AlgebraSet> + '_ {
        (0..1u64 << self.blocks.len()).map(|m| self.set_of_blocks(m as u32))
    }

    /// Algebra sets contained in `s`, which must itself be in the algebra.
    pub fn subsets_of(&self, s: AlgebraSet) -> Result<impl Iterator<Item = AlgebraSet> + '_> {
        let outer = self.block_mask(s)?;
        Ok(submasks(outer).map(move |m| self.set_of_blocks(m)))
    }

    /// True if every block of `self` is a union of blocks of `finer`.
    pub fn is_refined_by(&self, finer: &SubAlgebra) -> bool {
        self.n == finer.n && self.blocks.iter().all(|b| finer.contains(*b))
    }
}

/// All submasks of `mask`, including `0` and `mask` itself.
fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & mask)
        };
        Some(cur)
    })
}

/// Which continuity notion [`FAMeasure::continuity_check`] reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Continuity {
    /// Vanishes on every null set of the reference.
    Wac,
    /// The ε–δ criterion.
    Ac,
}

/// A bounded finitely additive measure on a finite algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FAMeasure {
    algebra: SubAlgebra,
    values: Vec<Rational>,
}

impl FAMeasure {
    pub fn new(algebra: SubAlgebra, values: Vec<Rational>) -> Result<Self> {
        if values.len() != algebra.block_count() {
            return Err(LatticeError::LengthMismatch {
                expected: algebra.block_count(),
                found: values.len(),
            });
        }
        Ok(Self { algebra, values })
    }

    /// A measure on the discrete algebra with the given atom masses.
    pub fn on_atoms(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(LatticeError::EmptyGroundSet);
        }
        Self::new(SubAlgebra::discrete(values.len()), values)
    }

    pub fn from_integers(algebra: SubAlgebra, values: &[i64]) -> Result<Self> {
        Self::new(
            algebra,
            values.iter().map(|&v| Rational::from_integer(v)).collect(),
        )
    }

    pub fn zero(algebra: SubAlgebra) -> Self {
        let values = vec![Rational::zero(); algebra.block_count()];
        Self { algebra, values }
    }

    pub fn algebra(&self) -> &SubAlgebra {
        &self.algebra
    }

    /// Mass of each block, in block order.
    pub fn block_values(&self) -> &[Rational] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    fn map(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        Self {
            algebra: self.algebra.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        if self.algebra != other.algebra {
            return Err(LatticeError::AlgebraMismatch);
        }
        Ok(Self {
            algebra: self.algebra.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: Rational) -> Self {
        self.map(|v| v * factor)
    }

    fn sum_over(&self, mask: u32) -> Rational {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, v)| *v)
            .sum()
    }

    /// `μ(s)`: the sum of the block masses inside `s`.
    pub fn evaluate(&self, s: AlgebraSet) -> Result<Rational> {
        Ok(self.sum_over(self.algebra.block_mask(s)?))
    }

    /// `|μ|(s) = Σ_{b ⊆ s} |μ(b)|`.
    pub fn total_variation(&self, s: AlgebraSet) -> Result<Rational> {
        let mask = self.algebra.block_mask(s)?;
        Ok(self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, v)| v.abs())
            .sum())
    }

    /// The variation measure `|μ|`.
    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    /// Total variation from its definition: the supremum of `Σ |μ(part)|`
    /// over every finite partition of `s` into algebra sets.
    pub fn tv_partition_oracle(&self, s: AlgebraSet) -> Result<Rational> {
        self.tv_partition_oracle_bounded(s, PARTITION_ORACLE_LIMIT)
    }

    pub fn tv_partition_oracle_bounded(&self, s: AlgebraSet, limit: usize) -> Result<Rational> {
        let mask = self.algebra.block_mask(s)?;
        let inside: Vec<Rational> = (0..self.values.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.values[i])
            .collect();
        if inside.len() > limit {
            return Err(LatticeError::TooLarge {
                blocks: inside.len(),
                limit,
            });
        }
        let mut best = Rational::zero();
        for_each_partition(inside.len(), |labels, parts| {
            let mut sums = vec![Rational::zero(); parts];
            for (v, &l) in inside.iter().zip(labels) {
                sums[l] += v;
            }
            let total: Rational = sums.iter().map(|x| x.abs()).sum();
            if total > best {
                best = total;
            }
        });
        Ok(best)
    }

    /// `(μ ∧ ν)(s) = inf_{s' ⊆ s} μ(s') + ν(s ∖ s')`, enumerated over every
    /// algebra subset of `s`.
    pub fn lattice_meet(&self, nu: &Self, s: AlgebraSet) -> Result<Rational> {
        if self.algebra != nu.algebra {
            return Err(LatticeError::AlgebraMismatch);
        }
        let outer = self.algebra.block_mask(s)?;
        Ok(submasks(outer)
            .map(|m| self.sum_over(m) + nu.sum_over(outer & !m))
            .min()
            .expect("at least the empty subset"))
    }

    /// The meet `μ ∧ ν` as a measure (blockwise minimum).
    pub fn meet(&self, nu: &Self) -> Result<Self> {
        self.zip(nu, |a, b| *a.min(b))
    }

    /// The join `μ ∨ ν` as a measure (blockwise maximum).
    pub fn join(&self, nu: &Self) -> Result<Self> {
        self.zip(nu, |a, b| *a.max(b))
    }

    /// `μ ≤ ν` in the setwise order.
    pub fn le(&self, nu: &Self) -> Result<bool> {
        if self.algebra != nu.algebra {
            return Err(LatticeError::AlgebraMismatch);
        }
        Ok(self.values.iter().zip(&nu.values).all(|(a, b)| a <= b))
    }

    /// `|μ| ∧ |ν| = 0` on the whole space.
    pub fn is_orthogonal(&self, nu: &Self) -> Result<bool> {
        let full = self.algebra.full();
        Ok(self.abs().lattice_meet(&nu.abs(), full)?.is_zero())
    }

    /// `(μ⁺, μ⁻)` with `μ = μ⁺ − μ⁻`.
    pub fn jordan_decompose(&self) -> (Self, Self) {
        let zero = Rational::zero();
        (self.map(|v| *v.max(&zero)), self.map(|v| (-v).max(zero)))
    }

    /// `μ⌊s`: `s' ↦ μ(s ∩ s')`.
    pub fn restrict(&self, s: AlgebraSet) -> Result<Self> {
        let mask = self.algebra.block_mask(s)?;
        let mut out = self.clone();
        for (i, v) in out.values.iter_mut().enumerate() {
            if mask >> i & 1 == 0 {
                *v = Rational::zero();
            }
        }
        Ok(out)
    }

    /// Splits `μ` into the part carried by `band` and the part carried by
    /// its complement. The two parts are orthogonal and sum to `μ`.
    pub fn band_decompose(&self, band: AlgebraSet) -> Result<(Self, Self)> {
        let inside = self.restrict(band)?;
        let outside = self.restrict(band.complement())?;
        Ok((inside, outside))
    }

    /// Splits `μ` into its σ-additive and purely finitely additive parts.
    /// Every measure on a finite algebra is σ-additive, so the first part is
    /// `μ` and the second is zero.
    pub fn yosida_hewitt(&self) -> (Self, Self) {
        self.band_decompose(self.algebra.full())
            .expect("the full set is in every algebra")
    }

    /// Continuity of `μ` with respect to `ν`.
    ///
    /// Both notions are computed independently and must agree; a mismatch
    /// is a bug in one of the two routes and panics.
    pub fn continuity_check(&self, nu: &Self, mode: Continuity) -> Result<bool> {
        if self.algebra != nu.algebra {
            return Err(LatticeError::AlgebraMismatch);
        }
        let wac = self.is_weakly_continuous(nu);
        let ac = self.is_absolutely_continuous(nu);
        assert_eq!(
            wac, ac,
            "weak and ε–δ absolute continuity disagree on a finite algebra"
        );
        Ok(match mode {
            Continuity::Wac => wac,
            Continuity::Ac => ac,
        })
    }

    // |ν|(s) = 0 holds exactly for unions of ν-null blocks, and μ vanishes
    // on all of those iff it vanishes on each such block.
    fn is_weakly_continuous(&self, nu: &Self) -> bool {
        self.values
            .iter()
            .zip(&nu.values)
            .all(|(m, n)| !n.is_zero() || m.is_zero())
    }

    // ε–δ search over the finitely many thresholds that can matter: the
    // smallest positive |μ(s)| as ε, and every attained |ν|(s) as δ.
    fn is_absolutely_continuous(&self, nu: &Self) -> bool {
        let var = nu.abs();
        let pairs: Vec<(Rational, Rational)> = (0..1u64 << self.values.len())
            .map(|m| (var.sum_over(m as u32), self.sum_over(m as u32).abs()))
            .collect();
        let Some(eps) = pairs.iter().map(|p| p.1).filter(|v| v.is_positive()).min() else {
            return true;
        };
        let mut deltas: Vec<Rational> = pairs
            .iter()
            .map(|p| p.0)
            .filter(|d| d.is_positive())
            .collect();
        deltas.push(Rational::from_integer(1));
        deltas
            .iter()
            .any(|&delta| pairs.iter().all(|&(v, m)| v >= delta || m < eps))
    }

    /// `μ*(b) = min { μ(A) : A ∈ algebra, b ⊆ A }` for `μ ≥ 0`.
    pub fn outer_measure(&self, b: AlgebraSet) -> Result<Rational> {
        if !self.is_nonnegative() {
            return Err(LatticeError::NegativeMeasure);
        }
        if b.universe_len() != self.algebra.n {
            return Err(LatticeError::GroundSetMismatch(
                self.algebra.n,
                b.universe_len(),
            ));
        }
        // μ ≥ 0, so the cheapest cover is the union of blocks meeting b.
        Ok(self
            .algebra
            .blocks
            .iter()
            .zip(&self.values)
            .filter(|(blk, _)| !blk.intersection(b).is_empty())
            .map(|(_, v)| *v)
            .sum())
    }
}

/// Calls `visit(labels, parts)` once per set partition of `k` items, with
/// `labels` a restricted growth string.
pub fn for_each_partition(k: usize, mut visit: impl FnMut(&[usize], usize)) {
    if k == 0 {
        visit(&[], 0);
        return;
    }
    let mut labels = vec![0usize; k];
    loop {
        let parts = labels.iter().max().map_or(0, |m| m + 1);
        visit(&labels, parts);
        // next restricted growth string
        let mut i = k - 1;
        loop {
            if i == 0 {
                return;
            }
            let bound = labels[..i].iter().max().copied().unwrap_or(0) + 1;
            if labels[i] < bound {
                labels[i] += 1;
                for l in &mut labels[i + 1..] {
                    *l = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Every algebra on `n` atoms, one per set partition.
pub fn all_algebras(n: usize) -> Vec<SubAlgebra> {
    let mut out = Vec::new();
    for_each_partition(n, |labels, _| {
        out.push(SubAlgebra::from_labels(labels).expect("restricted growth strings are valid"))
    });
    out
}

/// `count` measures cycling through every algebra on 1 to `max_atoms`
/// atoms, with block values `p/q`, `p ∈ [−6, 6]`, `q ∈ [1, 4]`, drawn from a
/// ChaCha8 stream seeded by `seed`.
pub fn seeded_family(count: usize, max_atoms: usize, seed: u64) -> Vec<FAMeasure> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let algebras: Vec<SubAlgebra> = (1..=max_atoms).flat_map(all_algebras).collect();
    (0..count)
        .map(|i| {
            let alg = algebras[i % algebras.len()].clone();
            let values = (0..alg.block_count())
                .map(|_| Rational::new(rng.random_range(-6i64..=6), rng.random_range(1i64..=4)))
                .collect();
            FAMeasure::new(alg, values).expect("one value per block")
        })
        .collect()
}

/// A function that is constant on the blocks of its algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleFunction {
    algebra: SubAlgebra,
    values: Vec<Rational>,
}

impl SimpleFunction {
    pub fn new(algebra: SubAlgebra, values: Vec<Rational>) -> Result<Self> {
        if values.len() != algebra.block_count() {
            return Err(LatticeError::LengthMismatch {
                expected: algebra.block_count(),
                found: values.len(),
            });
        }
        Ok(Self { algebra, values })
    }

    pub fn from_integers(algebra: SubAlgebra, values: &[i64]) -> Result<Self> {
        Self::new(
            algebra,
            values.iter().map(|&v| Rational::from_integer(v)).collect(),
        )
    }

    pub fn constant(algebra: SubAlgebra, c: Rational) -> Self {
        let values = vec![c; algebra.block_count()];
        Self { algebra, values }
    }

    pub fn indicator(algebra: SubAlgebra, s: AlgebraSet) -> Result<Self> {
        let mask = algebra.block_mask(s)?;
        let values = (0..algebra.block_count())
            .map(|i| Rational::from_integer(i64::from(mask >> i & 1)))
            .collect();
        Ok(Self { algebra, values })
    }

    pub fn algebra(&self) -> &SubAlgebra {
        &self.algebra
    }

    pub fn block_values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value_at(&self, atom: usize) -> Rational {
        self.values[self.algebra.block_of(atom)]
    }

    /// Values atom by atom.
    pub fn atom_values(&self) -> Vec<Rational> {
        (0..self.algebra.n).map(|a| self.value_at(a)).collect()
    }

    /// `αf + βg`; both functions must share an algebra.
    pub fn linear_combination(
        &self,
        alpha: Rational,
        other: &Self,
        beta: Rational,
    ) -> Result<Self> {
        if self.algebra != other.algebra {
            return Err(LatticeError::AlgebraMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(f, g)| alpha * f + beta * g)
            .collect();
        Ok(Self {
            algebra: self.algebra.clone(),
            values,
        })
    }

    /// `∫ f dμ = Σ_b f(b) μ(b)` over the blocks of `μ`'s algebra.
    pub fn integrate(&self, mu: &FAMeasure) -> Result<Rational> {
        integrate_simple(self, mu)
    }
}

pub fn integrate_simple(f: &SimpleFunction, mu: &FAMeasure) -> Result<Rational> {
    if f.algebra.n != mu.algebra.n {
        return Err(LatticeError::GroundSetMismatch(f.algebra.n, mu.algebra.n));
    }
    let mut total = Rational::zero();
    for (blk, m) in mu.algebra.blocks.iter().zip(&mu.values) {
        let mut atoms = blk.atoms();
        let first = f.value_at(atoms.next().expect("blocks are nonempty"));
        if atoms.any(|a| f.value_at(a) != first) {
            return Err(LatticeError::MeasurabilityMismatch);
        }
        total += first * m;
    }
    Ok(total)
}

/// How a sequence of simple functions continues after its explicit prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceTail {
    /// `f_k = g` for every `k` past the prefix.
    Constant(SimpleFunction),
    /// `f_k = base + rate / k` for every `k` past the prefix.
    InverseDecay {
        base: SimpleFunction,
        rate: SimpleFunction,
    },
}

/// A sequence `f_1, f_2, ...` given by a finite prefix and a closed-form tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleSequence {
    pub prefix: Vec<SimpleFunction>,
    pub tail: SequenceTail,
}

impl SimpleSequence {
    pub fn constant(g: SimpleFunction) -> Self {
        Self {
            prefix: Vec::new(),
            tail: SequenceTail::Constant(g),
        }
    }

    pub fn inverse_decay(base: SimpleFunction, rate: SimpleFunction) -> Self {
        Self {
            prefix: Vec::new(),
            tail: SequenceTail::InverseDecay { base, rate },
        }
    }

    fn universe_len(&self) -> usize {
        match &self.tail {
            SequenceTail::Constant(g) => g.algebra.n,
            SequenceTail::InverseDecay { base, .. } => base.algebra.n,
        }
    }

    /// Atom values of `f_k`, with `k ≥ 1`.
    pub fn term(&self, k: usize) -> Vec<Rational> {
        assert!(k >= 1, "sequences are indexed from 1");
        if let Some(f) = self.prefix.get(k - 1) {
            return f.atom_values();
        }
        match &self.tail {
            SequenceTail::Constant(g) => g.atom_values(),
            SequenceTail::InverseDecay { base, rate } => {
                let k = Rational::from_integer(k as i64);
                base.atom_values()
                    .into_iter()
                    .zip(rate.atom_values())
                    .map(|(b, r)| b + r / k)
                    .collect()
            }
        }
    }
}

/// `|μ|*({|f_k − f| > ε})` for one index `k`.
pub fn exceedance_mass(
    seq: &SimpleSequence,
    k: usize,
    f: &SimpleFunction,
    mu: &FAMeasure,
    eps: Rational,
) -> Result<Rational> {
    let n = mu.algebra.n;
    if seq.universe_len() != n || f.algebra.n != n {
        return Err(LatticeError::GroundSetMismatch(n, f.algebra.n));
    }
    let target = f.atom_values();
    let set = AlgebraSet::from_atoms(
        n,
        seq.term(k)
            .iter()
            .zip(&target)
            .enumerate()
            .filter(|(_, (a, b))| (*a - *b).abs() > eps)
            .map(|(i, _)| i),
    );
    mu.abs().outer_measure(set)
}

/// Decides `f_k → f` in `μ`-measure at tolerance `ε`: whether
/// `|μ|*({|f_k − f| > ε}) → 0`. The exceedance set of a constant or
/// `1/k`-decaying tail is eventually constant, so the limit is exact.
pub fn converges_in_measure(
    seq: &SimpleSequence,
    f: &SimpleFunction,
    mu: &FAMeasure,
    eps: Rational,
) -> Result<bool> {
    if !eps.is_positive() {
        return Err(LatticeError::NonPositiveTolerance);
    }
    let n = mu.algebra.n;
    if seq.universe_len() != n || f.algebra.n != n {
        return Err(LatticeError::GroundSetMismatch(n, f.algebra.n));
    }
    let target = f.atom_values();
    let eventual: Vec<usize> = match &seq.tail {
        SequenceTail::Constant(g) => g
            .atom_values()
            .iter()
            .zip(&target)
            .enumerate()
            .filter(|(_, (a, b))| (*a - *b).abs() > eps)
            .map(|(i, _)| i)
            .collect(),
        SequenceTail::InverseDecay { base, rate } => base
            .atom_values()
            .iter()
            .zip(&target)
            .zip(rate.atom_values())
            .enumerate()
            .filter(|(_, ((b, t), r))| {
                let d = *b - *t;
                let gap = d.abs() - eps;
                // on the threshold, the sign of the decay term decides
                gap.is_positive() || (gap.is_zero() && !r.is_zero() && r.signum() == d.signum())
            })
            .map(|(i, _)| i)
            .collect(),
    };
    let set = AlgebraSet::from_atoms(n, eventual);
    Ok(mu.abs().outer_measure(set)?.is_zero())
}

/// JSON fixture: `{atoms, blocks, values}` with values as
/// `[numerator, denominator]` pairs. An empty `blocks` list means one block
/// per atom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFixture {
    pub atoms: Vec<String>,
    #[serde(default)]
    pub blocks: Vec<Vec<String>>,
    pub values: Vec<[i64; 2]>,
}

impl MeasureFixture {
    pub fn from_measure(ground: &GroundSet, mu: &FAMeasure) -> Self {
        Self {
            atoms: ground.labels().to_vec(),
            blocks: mu
                .algebra
                .blocks
                .iter()
                .map(|b| ground.labels_of(*b))
                .collect(),
            values: mu.values.iter().map(|v| rational_pair(*v)).collect(),
        }
    }

    pub fn ground_set(&self) -> Result<GroundSet> {
        GroundSet::new(self.atoms.iter().cloned())
    }

    pub fn algebra(&self, ground: &GroundSet) -> Result<SubAlgebra> {
        if self.blocks.is_empty() {
            return Ok(SubAlgebra::discrete(ground.len()));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| ground.set(b))
            .collect::<Result<Vec<_>>>()?;
        SubAlgebra::from_blocks(ground.len(), blocks)
    }

    pub fn measure(&self) -> Result<(GroundSet, FAMeasure)> {
        let ground = self.ground_set()?;
        let algebra = self.algebra(&ground)?;
        let values = self
            .values
            .iter()
            .map(|&[n, d]| {
                if d == 0 {
                    Err(LatticeError::ZeroDenominator)
                } else {
                    Ok(Rational::new(n, d))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((ground, FAMeasure::new(algebra, values)?))
    }
}

pub fn rational_pair(r: Rational) -> [i64; 2] {
    [*r.numer(), *r.denom()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn abc(values: &[i64]) -> (GroundSet, FAMeasure) {
        let g = GroundSet::alphabetic(values.len()).unwrap();
        let mu = FAMeasure::from_integers(SubAlgebra::discrete(values.len()), values).unwrap();
        (g, mu)
    }

    fn coarse() -> (GroundSet, FAMeasure) {
        let g = GroundSet::alphabetic(3).unwrap();
        let alg =
            SubAlgebra::from_blocks(3, vec![g.set(&["a", "b"]).unwrap(), g.set(&["c"]).unwrap()])
                .unwrap();
        (g, FAMeasure::from_integers(alg, &[5, 2]).unwrap())
    }

    #[test]
    fn evaluate_examples() {
        let (g, mu) = abc(&[2, -3, 1]);
        assert_eq!(mu.evaluate(g.set(&["a", "b"]).unwrap()).unwrap(), r(-1));
        assert_eq!(mu.evaluate(AlgebraSet::empty(3)).unwrap(), r(0));
        let (g, mu) = coarse();
        assert_eq!(
            mu.evaluate(g.set(&["a"]).unwrap()),
            Err(LatticeError::NotInAlgebra)
        );
    }

    #[test]
    fn total_variation_examples() {
        let (g, mu) = abc(&[2, -3, 1]);
        assert_eq!(mu.total_variation(g.full()).unwrap(), r(6));
        assert_eq!(
            mu.total_variation(g.set(&["a", "b"]).unwrap()).unwrap(),
            r(5)
        );
        assert_eq!(mu.tv_partition_oracle(g.full()).unwrap(), r(6));
        assert_eq!(
            mu.tv_partition_oracle(g.set(&["a", "b"]).unwrap()).unwrap(),
            r(5)
        );
        let (g, pos) = abc(&[1, 1]);
        assert_eq!(pos.tv_partition_oracle(g.full()).unwrap(), r(2));
        assert_eq!(
            pos.total_variation(g.full()).unwrap(),
            pos.evaluate(g.full()).unwrap()
        );
        let (g, single) = abc(&[-4]);
        assert_eq!(single.tv_partition_oracle(g.full()).unwrap(), r(4));
    }

    #[test]
    fn partition_oracle_is_bounded() {
        let (g, mu) = abc(&[1, 2, 3, 4, 5, 6]);
        assert_eq!(
            mu.tv_partition_oracle(g.full()),
            Err(LatticeError::TooLarge {
                blocks: 6,
                limit: 5
            })
        );
        assert_eq!(mu.tv_partition_oracle_bounded(g.full(), 6).unwrap(), r(21));
    }

    #[test]
    fn partition_enumeration_counts_bell_numbers() {
        for (k, bell) in [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203)] {
            let mut count = 0;
            for_each_partition(k, |_, _| count += 1);
            assert_eq!(count, bell, "Bell({k})");
        }
    }

    #[test]
    fn meet_examples() {
        let (g, mu) = abc(&[2, 0, 1]);
        let (_, nu) = abc(&[1, 4, 0]);
        assert_eq!(mu.lattice_meet(&nu, g.full()).unwrap(), r(1));
        // attained at s' = {b}
        let b = g.set(&["b"]).unwrap();
        assert_eq!(
            mu.evaluate(b).unwrap() + nu.evaluate(b.complement()).unwrap(),
            r(1)
        );

        let (_, p) = abc(&[3, 0, 0]);
        let (_, q) = abc(&[0, 2, 7]);
        assert_eq!(p.lattice_meet(&q, g.full()).unwrap(), r(0));
        assert!(p.is_orthogonal(&q).unwrap());
        for s in mu.algebra().sets() {
            assert_eq!(mu.lattice_meet(&mu, s).unwrap(), mu.evaluate(s).unwrap());
        }
    }

    #[test]
    fn jordan_examples() {
        let (_, mu) = abc(&[2, -3, 1]);
        let (pos, neg) = mu.jordan_decompose();
        assert_eq!(pos, abc(&[2, 0, 1]).1);
        assert_eq!(neg, abc(&[0, 3, 0]).1);
        let (_, m) = abc(&[1, 0, 4]);
        assert_eq!(
            m.jordan_decompose(),
            (m.clone(), FAMeasure::zero(m.algebra().clone()))
        );
        let (_, m) = abc(&[-1]);
        assert_eq!(m.jordan_decompose(), (abc(&[0]).1, abc(&[1]).1));
    }

    #[test]
    fn restrict_examples() {
        let (g, mu) = abc(&[2, -3, 1]);
        let part = mu.restrict(g.set(&["a", "b"]).unwrap()).unwrap();
        assert_eq!(part.evaluate(g.set(&["b", "c"]).unwrap()).unwrap(), r(-3));
        assert_eq!(mu.restrict(g.full()).unwrap(), mu);
        assert!(mu.restrict(AlgebraSet::empty(3)).unwrap().is_zero());
    }

    #[test]
    fn band_examples() {
        let (g, mu) = abc(&[2, -3, 1]);
        let (s, perp) = mu.band_decompose(g.set(&["a"]).unwrap()).unwrap();
        assert_eq!(s, abc(&[2, 0, 0]).1);
        assert_eq!(perp, abc(&[0, -3, 1]).1);
        let (s, perp) = mu.band_decompose(g.full()).unwrap();
        assert_eq!(s, mu);
        assert!(perp.is_zero());
        let (_, c) = coarse();
        assert_eq!(
            c.band_decompose(g.set(&["a"]).unwrap()),
            Err(LatticeError::NotInAlgebra)
        );
    }

    #[test]
    fn continuity_examples() {
        let (_, mu) = abc(&[2, -3, 1]);
        let (_, nu) = abc(&[1, 4, 0]);
        assert!(!mu.continuity_check(&nu, Continuity::Wac).unwrap());
        assert!(!mu.continuity_check(&nu, Continuity::Ac).unwrap());
        let (_, mu) = abc(&[2, -3, 0]);
        assert!(mu.continuity_check(&nu, Continuity::Wac).unwrap());
        let (_, full_support) = abc(&[1, -2, 5]);
        for vals in [[7, 0, -1], [0, 0, 0], [-3, 9, 2]] {
            let (_, m) = abc(&vals);
            assert!(m.continuity_check(&full_support, Continuity::Wac).unwrap());
            assert!(m.continuity_check(&full_support, Continuity::Ac).unwrap());
        }
    }

    #[test]
    fn outer_measure_examples() {
        let (g, mu) = coarse();
        assert_eq!(mu.outer_measure(g.set(&["a"]).unwrap()).unwrap(), r(5));
        assert_eq!(mu.outer_measure(g.set(&["a", "c"]).unwrap()).unwrap(), r(7));
        assert_eq!(mu.outer_measure(AlgebraSet::empty(3)).unwrap(), r(0));
        let (g, signed) = abc(&[1, -1, 0]);
        assert_eq!(
            signed.outer_measure(g.full()),
            Err(LatticeError::NegativeMeasure)
        );
    }

    #[test]
    fn integrate_examples() {
        let (g, mu) = abc(&[2, -3, 1]);
        let alg = mu.algebra().clone();
        let f = SimpleFunction::from_integers(alg.clone(), &[1, 2, 3]).unwrap();
        assert_eq!(integrate_simple(&f, &mu).unwrap(), r(-1));
        let one = SimpleFunction::constant(alg.clone(), r(1));
        assert_eq!(one.integrate(&mu).unwrap(), mu.evaluate(g.full()).unwrap());
        let s = g.set(&["a", "c"]).unwrap();
        let ind = SimpleFunction::indicator(alg, s).unwrap();
        assert_eq!(ind.integrate(&mu).unwrap(), mu.evaluate(s).unwrap());

        let (_, c) = coarse();
        assert_eq!(
            integrate_simple(&f, &c),
            Err(LatticeError::MeasurabilityMismatch)
        );
        let g_coarse = SimpleFunction::from_integers(SubAlgebra::discrete(3), &[4, 4, -1]).unwrap();
        assert_eq!(integrate_simple(&g_coarse, &c).unwrap(), r(18));
    }

    #[test]
    fn convergence_in_measure_examples() {
        let (g, mu) = abc(&[3, 0, -2]);
        let alg = mu.algebra().clone();
        let f = SimpleFunction::from_integers(alg.clone(), &[1, -1, 2]).unwrap();
        let eps = Rational::new(1, 10);
        let bump_b = SimpleFunction::indicator(alg.clone(), g.set(&["b"]).unwrap()).unwrap();
        let f_plus_b = f.linear_combination(r(1), &bump_b, r(1)).unwrap();
        assert!(converges_in_measure(&SimpleSequence::constant(f_plus_b), &f, &mu, eps).unwrap());

        let one = SimpleFunction::constant(alg.clone(), r(1));
        assert!(
            converges_in_measure(&SimpleSequence::inverse_decay(f.clone(), one), &f, &mu, eps)
                .unwrap()
        );

        let bump_a = SimpleFunction::indicator(alg, g.set(&["a"]).unwrap()).unwrap();
        let f_plus_a = f.linear_combination(r(1), &bump_a, r(1)).unwrap();
        assert!(!converges_in_measure(&SimpleSequence::constant(f_plus_a), &f, &mu, eps).unwrap());
        assert_eq!(
            converges_in_measure(&SimpleSequence::constant(f.clone()), &f, &mu, r(0)),
            Err(LatticeError::NonPositiveTolerance)
        );
    }

    #[test]
    fn decay_on_the_threshold_uses_the_sign_of_the_rate() {
        let (_, mu) = abc(&[1]);
        let alg = mu.algebra().clone();
        let f = SimpleFunction::constant(alg.clone(), r(0));
        let base = SimpleFunction::constant(alg.clone(), r(1));
        let up = SimpleFunction::constant(alg.clone(), r(1));
        let down = SimpleFunction::constant(alg, r(-1));
        let eps = r(1);
        assert!(!converges_in_measure(
            &SimpleSequence::inverse_decay(base.clone(), up.clone()),
            &f,
            &mu,
            eps
        )
        .unwrap());
        assert!(converges_in_measure(
            &SimpleSequence::inverse_decay(base.clone(), down.clone()),
            &f,
            &mu,
            eps
        )
        .unwrap());
        let seq = SimpleSequence::inverse_decay(base, up);
        assert_eq!(exceedance_mass(&seq, 1_000, &f, &mu, eps).unwrap(), r(1));
    }

    #[test]
    fn sub_algebra_validation() {
        let n = 3;
        let a = AlgebraSet::from_atoms(n, [0, 1]);
        let b = AlgebraSet::from_atoms(n, [1, 2]);
        assert!(matches!(
            SubAlgebra::from_blocks(n, vec![a, b]),
            Err(LatticeError::BadPartition(_))
        ));
        assert!(matches!(
            SubAlgebra::from_blocks(n, vec![a]),
            Err(LatticeError::BadPartition(_))
        ));
        let alg = SubAlgebra::from_labels(&[0, 0, 1]).unwrap();
        assert_eq!(alg.block_count(), 2);
        assert_eq!(alg.sets().count(), 4);
        assert!(alg.is_refined_by(&SubAlgebra::discrete(3)));
        assert!(!SubAlgebra::discrete(3).is_refined_by(&alg));
    }

    #[test]
    fn ground_set_validation() {
        assert_eq!(
            GroundSet::new(Vec::<String>::new()),
            Err(LatticeError::EmptyGroundSet)
        );
        assert_eq!(
            GroundSet::new(["a", "a"]),
            Err(LatticeError::DuplicateAtom("a".into()))
        );
        assert!(matches!(
            GroundSet::alphabetic(13),
            Err(LatticeError::TooManyAtoms { .. })
        ));
        assert!(GroundSet::with_limit((0..20).map(|i| i.to_string()), 20).is_ok());
    }

    #[test]
    fn fixture_round_trip() {
        let json = r#"{"atoms":["a","b","c"],"blocks":[["a","b"],["c"]],"values":[[5,1],[2,1]]}"#;
        let fx: MeasureFixture = serde_json::from_str(json).unwrap();
        let (g, mu) = fx.measure().unwrap();
        assert_eq!(mu, coarse().1);
        assert_eq!(MeasureFixture::from_measure(&g, &mu), fx);
        let bad = r#"{"atoms":["a"],"values":[[1,0]]}"#;
        let fx: MeasureFixture = serde_json::from_str(bad).unwrap();
        assert_eq!(fx.measure().unwrap_err(), LatticeError::ZeroDenominator);
    }
}
