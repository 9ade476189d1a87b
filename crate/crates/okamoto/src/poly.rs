//! Dense univariate polynomials over a [`Field`].

use std::ops::{Add, Mul, Neg, Sub};

use crate::field::Field;

/// Coefficients in ascending order. Trailing zeros are allowed; use
/// [`Poly::degree`] for the exact degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F> {
    pub coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(coeffs: Vec<F>) -> Self {
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// `z - a`
    pub fn linear_root(a: F) -> Self {
        Poly { coeffs: vec![-a, F::one()] }
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    /// Exact degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_exact_zero())
    }

    /// Degree ignoring coefficients that are zero within the field tolerance,
    /// relative to the largest coefficient.
    pub fn degree_within(&self) -> Option<usize> {
        let s = self.max_abs();
        self.coeffs.iter().rposition(|c| !c.is_zero_within(s))
    }

    pub fn is_zero_within(&self, scale: f64) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_within(scale))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn trimmed(mut self) -> Self {
        while matches!(self.coeffs.last(), Some(c) if c.is_exact_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn eval(&self, z: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * F::from_i64(k as i64))
            .collect();
        Poly { coeffs }
    }

    pub fn scale(&self, s: &F) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect() }
    }

    /// `prod (z - r)` over the given roots.
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a F>) -> Self {
        let mut p = Poly::constant(F::one());
        for r in roots {
            p = &p * &Poly::linear_root(r.clone());
        }
        p
    }

    /// Lagrange interpolation through `(nodes[i], values[i])`.
    pub fn interpolate(nodes: &[F], values: &[F]) -> Self {
        assert_eq!(nodes.len(), values.len());
        let mut out = Poly::zero();
        for (i, (ti, vi)) in nodes.iter().zip(values).enumerate() {
            let others: Vec<&F> = nodes.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| t).collect();
            let basis = Poly::from_roots(others.iter().copied());
            let denom = basis.eval(ti);
            out = &out + &basis.scale(&(vi.clone() / denom));
        }
        out
    }

    /// Euclidean division; `None` if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Poly<F>) -> Option<(Poly<F>, Poly<F>)> {
        let dd = divisor.degree()?;
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.clone().trimmed();
        let n = rem.coeffs.len();
        if n <= dd {
            return Some((Poly::zero(), rem));
        }
        let mut quot = vec![F::zero(); n - dd];
        for k in (dd..n).rev() {
            let c = rem.coeffs[k].clone() / lead.clone();
            if c.is_exact_zero() {
                continue;
            }
            for j in 0..=dd {
                rem.coeffs[k - dd + j] = rem.coeffs[k - dd + j].clone() - c.clone() * divisor.coeffs[j].clone();
            }
            quot[k - dd] = c;
        }
        rem.coeffs.truncate(dd);
        Some((Poly::new(quot), rem))
    }
}

impl<F: Field> Add for &Poly<F> {
    type Output = Poly<F>;
    fn add(self, rhs: &Poly<F>) -> Poly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly { coeffs: (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect() }
    }
}

impl<F: Field> Sub for &Poly<F> {
    type Output = Poly<F>;
    fn sub(self, rhs: &Poly<F>) -> Poly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly { coeffs: (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect() }
    }
}

impl<F: Field> Mul for &Poly<F> {
    type Output = Poly<F>;
    fn mul(self, rhs: &Poly<F>) -> Poly<F> {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly { coeffs: out }
    }
}

impl<F: Field> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{qr, QC};

    fn p(c: &[i64]) -> Poly<QC> {
        Poly::new(c.iter().map(|&x| qr(x, 1)).collect())
    }

    #[test]
    fn interpolation_reproduces_cubic() {
        let f = p(&[1, -2, 0, 3]);
        let nodes: Vec<QC> = [0, 1, 2, 5].iter().map(|&x| qr(x, 1)).collect();
        let vals: Vec<QC> = nodes.iter().map(|t| f.eval(t)).collect();
        let g = Poly::interpolate(&nodes, &vals);
        assert_eq!((&g - &f).degree(), None);
    }

    #[test]
    fn division_roundtrip() {
        let a = p(&[3, 0, 1, 4]);
        let b = p(&[-1, 2]);
        let (q, r) = a.div_rem(&b).unwrap();
        let back = &(&q * &b) + &r;
        assert_eq!((&back - &a).degree(), None);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn derivative_and_roots() {
        let f = Poly::<QC>::from_roots([qr(1, 1), qr(2, 1)].iter());
        assert_eq!(f, p(&[2, -3, 1]));
        assert_eq!(f.derivative(), p(&[-3, 2]));
    }
}
