//! Picard lattices of blow-ups of the Hirzebruch surface Σ₂.
//!
//! Classes are integer vectors over the fixed basis `{C0, F, E...}` where the
//! `E` are total transforms of exceptional curves. Proper transforms (the
//! components `D_i`, the curves `C1`, `C2`) are computed, never stored.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },
    #[error("point index {0} out of range 1..=4")]
    PointIndex(usize),
    #[error("no exceptional class {0}")]
    MissingClass(String),
}

/// Blow-up stage at one of the four singular fibres.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    Plus,
    Minus,
    /// First of two infinitely near centres.
    First,
    /// Second centre, lying on the first exceptional curve.
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    C0,
    F,
    E { point: usize, level: Level },
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::C0 => write!(f, "C0"),
            BasisLabel::F => write!(f, "F"),
            BasisLabel::E { point, level } => {
                let s = match level {
                    Level::Plus => "+",
                    Level::Minus => "-",
                    Level::First => "1",
                    Level::Second => "2",
                };
                write!(f, "E[{point},{s}]")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    pub coeffs: Vec<BigInt>,
}

impl DivisorClass {
    pub fn zero(rank: usize) -> Self {
        DivisorClass { coeffs: vec![BigInt::zero(); rank] }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        DivisorClass { coeffs: c.iter().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Self {
        assert_eq!(self.rank(), rhs.rank(), "divisor classes over different lattices");
        DivisorClass { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| f(a, b)).collect() }
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

impl Mul<&DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, rhs: &DivisorClass) -> DivisorClass {
        let k = BigInt::from(self);
        DivisorClass { coeffs: rhs.coeffs.iter().map(|a| &k * a).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceLattice {
    pub base_degree: i64,
    pub basis: Vec<BasisLabel>,
    pub gram: Vec<Vec<BigInt>>,
    pub canonical: DivisorClass,
}

/// Plain-integer export of a lattice for JSON reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeExport {
    pub base_degree: i64,
    pub basis: Vec<String>,
    pub gram: Vec<Vec<i64>>,
    pub canonical: Vec<i64>,
}

impl SurfaceLattice {
    /// Σ_e itself: basis `{C0, F}`, `K = -2 C0 - (e+2) F`.
    pub fn hirzebruch(e: i64) -> Self {
        Self::blow_up(e, &[])
    }

    /// Σ_e blown up at the given centres. Exceptional classes are total
    /// transforms, so the Gram matrix is `[[-e,1],[1,0]] ⊕ (-1)^k`.
    pub fn blow_up(e: i64, centres: &[(usize, Level)]) -> Self {
        let mut basis = vec![BasisLabel::C0, BasisLabel::F];
        basis.extend(centres.iter().map(|&(point, level)| BasisLabel::E { point, level }));
        let n = basis.len();
        let mut gram = vec![vec![BigInt::zero(); n]; n];
        gram[0][0] = BigInt::from(-e);
        gram[0][1] = BigInt::one();
        gram[1][0] = BigInt::one();
        for (k, row) in gram.iter_mut().enumerate().skip(2) {
            row[k] = -BigInt::one();
        }
        let mut canonical = DivisorClass::zero(n);
        canonical.coeffs[0] = BigInt::from(-2);
        canonical.coeffs[1] = BigInt::from(-(e + 2));
        for c in canonical.coeffs.iter_mut().skip(2) {
            *c = BigInt::one();
        }
        SurfaceLattice { base_degree: e, basis, gram, canonical }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_class(&self, label: BasisLabel) -> Result<DivisorClass, LatticeError> {
        let k = self
            .basis
            .iter()
            .position(|b| *b == label)
            .ok_or_else(|| LatticeError::MissingClass(label.to_string()))?;
        let mut c = DivisorClass::zero(self.rank());
        c.coeffs[k] = BigInt::one();
        Ok(c)
    }

    pub fn c0(&self) -> DivisorClass {
        self.basis_class(BasisLabel::C0).expect("C0 always present")
    }

    pub fn fibre(&self) -> DivisorClass {
        self.basis_class(BasisLabel::F).expect("F always present")
    }

    pub fn exceptional(&self, point: usize, level: Level) -> Result<DivisorClass, LatticeError> {
        self.basis_class(BasisLabel::E { point, level })
    }

    pub fn exceptionals_at(&self, point: usize) -> Vec<DivisorClass> {
        self.basis
            .iter()
            .filter(|b| matches!(b, BasisLabel::E { point: p, .. } if *p == point))
            .map(|b| self.basis_class(*b).expect("label from basis"))
            .collect()
    }

    pub fn exceptional_count(&self) -> usize {
        self.rank() - 2
    }

    pub fn intersect(&self, a: &DivisorClass, b: &DivisorClass) -> Result<BigInt, LatticeError> {
        for c in [a, b] {
            if c.rank() != self.rank() {
                return Err(LatticeError::Dimension { left: c.rank(), right: self.rank() });
            }
        }
        let mut s = BigInt::zero();
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                let g = &self.gram[i][j];
                if !g.is_zero() && !bj.is_zero() {
                    s += ai * g * bj;
                }
            }
        }
        Ok(s)
    }

    pub fn self_intersection(&self, a: &DivisorClass) -> BigInt {
        self.intersect(a, a).expect("class from this lattice")
    }

    /// `D0 = C0`; for `i` in `1..=4`, `D_i = F - Σ E` over the centres on fibre `i`.
    pub fn d(&self, i: usize) -> Result<DivisorClass, LatticeError> {
        match i {
            0 => Ok(self.c0()),
            1..=4 => Ok(self.exceptionals_at(i).iter().fold(self.fibre(), |acc, e| &acc - e)),
            _ => Err(LatticeError::PointIndex(i)),
        }
    }

    /// For an infinitely near pair at `point`: `(C1, C2) = (E2, E1 - E2)`.
    pub fn coincident_curves(&self, point: usize) -> Result<(DivisorClass, DivisorClass), LatticeError> {
        let e1 = self.exceptional(point, Level::First)?;
        let e2 = self.exceptional(point, Level::Second)?;
        let c2 = &e1 - &e2;
        Ok((e2, c2))
    }

    pub fn is_coincident(&self, point: usize) -> bool {
        self.basis.contains(&BasisLabel::E { point, level: Level::First })
    }

    pub fn export(&self) -> LatticeExport {
        let small = |x: &BigInt| x.to_i64().expect("small lattice entry");
        LatticeExport {
            base_degree: self.base_degree,
            basis: self.basis.iter().map(|b| b.to_string()).collect(),
            gram: self.gram.iter().map(|r| r.iter().map(small).collect()).collect(),
            canonical: self.canonical.coeffs.iter().map(small).collect(),
        }
    }
}

/// Blow up Σ₂ at two centres over each of the four fibres. A `true` flag
/// makes the two centres infinitely near.
pub fn build_okamoto_surface(coincidences: [bool; 4]) -> SurfaceLattice {
    let mut centres = Vec::with_capacity(8);
    for (k, &c) in coincidences.iter().enumerate() {
        let p = k + 1;
        if c {
            centres.push((p, Level::First));
            centres.push((p, Level::Second));
        } else {
            centres.push((p, Level::Plus));
            centres.push((p, Level::Minus));
        }
    }
    SurfaceLattice::blow_up(2, &centres)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub label: String,
    pub class: DivisorClass,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpPairConfig {
    pub lattice: SurfaceLattice,
    pub components: Vec<Component>,
    /// Curves reported alongside `Y` but not part of it (the `C1`, `C2`
    /// classes at coincident fibres).
    pub auxiliary: Vec<(String, DivisorClass)>,
}

impl OpPairConfig {
    pub fn total(&self) -> DivisorClass {
        self.components
            .iter()
            .fold(DivisorClass::zero(self.lattice.rank()), |acc, c| &acc + &(c.multiplicity as i64 * &c.class))
    }

    pub fn dual_graph(&self) -> Vec<Vec<BigInt>> {
        self.components
            .iter()
            .map(|a| {
                self.components
                    .iter()
                    .map(|b| self.lattice.intersect(&a.class, &b.class).expect("same lattice"))
                    .collect()
            })
            .collect()
    }
}

/// `Y = 2 D0 + D1 + D2 + D3 + D4`. At coincident fibres the classes `C1`,
/// `C2` are listed as auxiliary curves.
pub fn anti_canonical(lattice: &SurfaceLattice) -> OpPairConfig {
    let mut components = vec![Component { label: "D0".into(), class: lattice.c0(), multiplicity: 2 }];
    let mut auxiliary = Vec::new();
    for i in 1..=4 {
        components.push(Component {
            label: format!("D{i}"),
            class: lattice.d(i).expect("index in range"),
            multiplicity: 1,
        });
        if lattice.is_coincident(i) {
            let (c1, c2) = lattice.coincident_curves(i).expect("coincident fibre");
            auxiliary.push((format!("C1[{i}]"), c1));
            auxiliary.push((format!("C2[{i}]"), c2));
        }
    }
    OpPairConfig { lattice: lattice.clone(), components, auxiliary }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCheck {
    pub name: String,
    pub passed: bool,
    pub value: i64,
    pub expected: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpPairReport {
    pub ok: bool,
    pub checks: Vec<LatticeCheck>,
}

/// Checks `Σ m_i Y_i = -K_S` and `Y·Y_i = 0` for every component.
pub fn verify_op_pair(cfg: &OpPairConfig) -> OpPairReport {
    let lat = &cfg.lattice;
    let y = cfg.total();
    let minus_k = -&lat.canonical;
    let mut checks = Vec::new();
    let diff = &y - &minus_k;
    let off = diff.coeffs.iter().filter(|c| !c.is_zero()).count() as i64;
    checks.push(LatticeCheck { name: "Y = -K".into(), passed: off == 0, value: off, expected: 0 });
    for c in &cfg.components {
        checks.push(LatticeCheck {
            name: format!("multiplicity({}) >= 1", c.label),
            passed: c.multiplicity >= 1,
            value: c.multiplicity as i64,
            expected: 1,
        });
        let v = lat.intersect(&y, &c.class).expect("same lattice").to_i64().unwrap_or(i64::MAX);
        checks.push(LatticeCheck { name: format!("Y.{}", c.label), passed: v == 0, value: v, expected: 0 });
    }
    OpPairReport { ok: checks.iter().all(|c| c.passed), checks }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DynkinType {
    /// Single component of square zero.
    SmoothI0,
    A(usize),
    D(usize),
    E(usize),
    Unclassified { gram: Vec<Vec<i64>> },
}

impl DynkinType {
    pub fn kodaira(&self) -> Option<String> {
        Some(match self {
            DynkinType::SmoothI0 => "I0".into(),
            DynkinType::A(n) => format!("I{}", n + 1),
            DynkinType::D(4) => "I0*".into(),
            DynkinType::D(n) => format!("I{}*", n - 4),
            DynkinType::E(6) => "IV*".into(),
            DynkinType::E(7) => "III*".into(),
            DynkinType::E(8) => "II*".into(),
            _ => return None,
        })
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynkinType::SmoothI0 => write!(f, "smooth/I0"),
            DynkinType::A(n) => write!(f, "A{n}(1)"),
            DynkinType::D(n) => write!(f, "D{n}(1)"),
            DynkinType::E(n) => write!(f, "E{n}(1)"),
            DynkinType::Unclassified { .. } => write!(f, "unclassified"),
        }
    }
}

fn cartan_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0i64; n]; n];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    for &(a, b) in edges {
        c[a][b] -= 1;
        c[b][a] -= 1;
    }
    c
}

/// Star-shaped tree with a centre and arms of the given lengths.
fn star(arms: &[usize]) -> Vec<Vec<i64>> {
    let mut edges = Vec::new();
    let mut next = 1;
    for &len in arms {
        let mut prev = 0;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    cartan_from_edges(next, &edges)
}

/// Affine Cartan matrix of the given type, if it exists.
pub fn affine_cartan(t: &DynkinType) -> Option<Vec<Vec<i64>>> {
    match *t {
        DynkinType::A(1) => Some(vec![vec![2, -2], vec![-2, 2]]),
        DynkinType::A(n) if n >= 2 => {
            let edges: Vec<_> = (0..=n).map(|k| (k, (k + 1) % (n + 1))).collect();
            Some(cartan_from_edges(n + 1, &edges))
        }
        DynkinType::D(4) => Some(star(&[1, 1, 1, 1])),
        DynkinType::D(n) if n > 4 => {
            let mut edges = vec![(0, 2), (1, 2)];
            edges.extend((2..n - 1).map(|k| (k, k + 1)));
            edges.push((n - 2, n));
            Some(cartan_from_edges(n + 1, &edges))
        }
        DynkinType::E(6) => Some(star(&[2, 2, 2])),
        DynkinType::E(7) => Some(star(&[1, 3, 3])),
        DynkinType::E(8) => Some(star(&[1, 2, 5])),
        _ => None,
    }
}

/// Backtracking search for a relabelling with `target[i][k] == cand[perm i][perm k]`.
fn permutation_match(target: &[Vec<i64>], cand: &[Vec<i64>]) -> bool {
    fn go(k: usize, perm: &mut Vec<usize>, used: &mut [bool], t: &[Vec<i64>], c: &[Vec<i64>]) -> bool {
        if k == t.len() {
            return true;
        }
        for j in 0..t.len() {
            if used[j] || t[k][k] != c[j][j] {
                continue;
            }
            if (0..k).all(|i| t[k][i] == c[j][perm[i]]) {
                perm.push(j);
                used[j] = true;
                if go(k + 1, perm, used, t, c) {
                    return true;
                }
                used[j] = false;
                perm.pop();
            }
        }
        false
    }
    if target.len() != cand.len() {
        return false;
    }
    let mut perm = Vec::new();
    let mut used = vec![false; target.len()];
    go(0, &mut perm, &mut used, target, cand)
}

/// Matches the negated component Gram matrix against the affine Cartan
/// matrices of matching size.
pub fn dynkin_type(cfg: &OpPairConfig) -> DynkinType {
    let gram: Vec<Vec<i64>> = cfg
        .dual_graph()
        .iter()
        .map(|r| r.iter().map(|x| x.to_i64().unwrap_or(i64::MAX)).collect())
        .collect();
    let m = gram.len();
    if m == 1 && gram[0][0] == 0 {
        return DynkinType::SmoothI0;
    }
    let neg: Vec<Vec<i64>> = gram.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    let mut candidates = Vec::new();
    if m >= 2 {
        candidates.push(DynkinType::A(m - 1));
    }
    if m >= 5 {
        candidates.push(DynkinType::D(m - 1));
    }
    match m {
        7 => candidates.push(DynkinType::E(6)),
        8 => candidates.push(DynkinType::E(7)),
        9 => candidates.push(DynkinType::E(8)),
        _ => {}
    }
    for t in candidates {
        let c = affine_cartan(&t).expect("candidate types exist");
        if permutation_match(&neg, &c) {
            return t;
        }
    }
    DynkinType::Unclassified { gram }
}
