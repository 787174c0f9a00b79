//! Root finding for real polynomials: quadratic factorization of norm
//! polynomials and certified isolation of real roots.

use nalgebra::{Complex, DMatrix, Schur};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::RealPolynomial;
use crate::quatcore::{Rational, Scalar};
use crate::{Error, Result};

fn complex_eval(c: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn polish_root(c: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    let mut best = complex_eval(c, z).0.norm();
    for _ in 0..60 {
        let (p, dp) = complex_eval(c, z);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let val = complex_eval(c, cand).0.norm();
        if !(val < best) {
            break;
        }
        best = val;
        z = cand;
    }
    z
}

/// Roots of a real polynomial from the eigenvalues of its companion matrix,
/// each polished by Newton steps that must decrease `|p(z)|`.
pub fn complex_roots(p: &RealPolynomial<f64>) -> Result<Vec<Complex<f64>>> {
    let n = match p.degree() {
        None | Some(0) => return Ok(Vec::new()),
        Some(n) => n,
    };
    let m = p.monic();
    let c = m.coeffs();
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i];
    }
    let eig: Vec<Complex<f64>> = match Schur::try_new(comp, f64::EPSILON, 10_000) {
        Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
        None => aberth(c)?,
    };
    if eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::RootFindingFailure);
    }
    Ok(eig.into_iter().map(|z| polish_root(c, z)).collect())
}

/// Simultaneous Aberth–Ehrlich iteration for a monic polynomial; used when
/// the Schur iteration does not converge (repeated complex roots).
fn aberth(c: &[f64]) -> Result<Vec<Complex<f64>>> {
    let n = c.len() - 1;
    let radius = c[..n].iter().fold(0.0f64, |m, v| m.max(v.abs())) + 1.0;
    let mut z: Vec<Complex<f64>> =
        (0..n).map(|k| Complex::from_polar(0.5 * radius, 0.4 + std::f64::consts::TAU * k as f64 / n as f64)).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = complex_eval(c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex<f64> = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            z[k] -= step;
            moved = moved.max(step.norm() / z[k].norm().max(1.0));
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    if z.iter().all(|w| w.re.is_finite() && w.im.is_finite()) {
        Ok(z)
    } else {
        Err(Error::RootFindingFailure)
    }
}

/// Splits `ν` (no real roots) into monic quadratics `t² + b t + c`, sorted by
/// the real part of their roots and then by `c`.
pub fn quadratic_real_factors(nu: &RealPolynomial<f64>) -> Result<Vec<RealPolynomial<f64>>> {
    let n = match nu.degree() {
        None => return Err(Error::RootFindingFailure),
        Some(n) => n,
    };
    if n % 2 == 1 {
        return Err(Error::RealRootPresent);
    }
    let roots = complex_roots(nu)?;
    let is_real = |z: &Complex<f64>| z.im.abs() <= 1e-7 * z.norm().max(1.0);
    if roots.iter().any(is_real) {
        return Err(Error::RealRootPresent);
    }
    let mut upper: Vec<Complex<f64>> = roots.iter().copied().filter(|z| z.im > 0.0).collect();
    let mut lower: Vec<Complex<f64>> = roots.iter().copied().filter(|z| z.im < 0.0).collect();
    if upper.len() != lower.len() {
        return Err(Error::RootFindingFailure);
    }
    let mut quads = Vec::with_capacity(upper.len());
    for z in upper.drain(..) {
        let (k, dist) = lower
            .iter()
            .enumerate()
            .map(|(k, w)| (k, (w.conj() - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::RootFindingFailure)?;
        if dist > 1e-7 * z.norm().max(1.0) {
            return Err(Error::RootFindingFailure);
        }
        let w = lower.swap_remove(k);
        let re = 0.5 * (z.re + w.re);
        let im2 = 0.5 * (z.im * z.im + w.im * w.im);
        quads.push(RealPolynomial::new(vec![re * re + im2, -2.0 * re, 1.0]));
    }
    quads.sort_by(|a, b| {
        let ra = -0.5 * a.coeff(1);
        let rb = -0.5 * b.coeff(1);
        ra.total_cmp(&rb).then(a.coeff(0).total_cmp(&b.coeff(0)))
    });
    let prod = quads.iter().fold(RealPolynomial::one(), |acc, q| &acc * q);
    let m = nu.monic();
    let err = (&prod - &m).max_abs_coeff();
    if err > 1e-6 * m.max_abs_coeff() {
        return Err(Error::RootFindingFailure);
    }
    Ok(quads)
}

/// Integer polynomial obtained by a positive rescaling (signs preserved).
fn primitive(p: &RealPolynomial<Rational>) -> RealPolynomial<Rational> {
    if p.is_zero() {
        return p.clone();
    }
    let lcm = p.coeffs().iter().fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coeffs().iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    RealPolynomial::new(ints.into_iter().map(|c| Rational::from_integer(c / &g)).collect())
}

/// Sturm sequence of a polynomial with exact rational coefficients.
pub struct SturmSequence {
    seq: Vec<RealPolynomial<Rational>>,
}

impl SturmSequence {
    pub fn new(p: &RealPolynomial<Rational>) -> Self {
        let mut seq = vec![primitive(p), primitive(&p.derivative())];
        while !seq.last().is_some_and(|s| s.is_zero() || s.degree() == Some(0)) {
            let k = seq.len();
            let (_, r) = seq[k - 2].div_rem(&seq[k - 1]);
            seq.push(primitive(&-&r));
        }
        seq.retain(|s| !s.is_zero());
        Self { seq }
    }

    pub fn polynomial(&self) -> &RealPolynomial<Rational> {
        &self.seq[0]
    }

    /// Sign changes of the sequence at `x`, zeros skipped.
    pub fn variations(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for s in &self.seq {
            let v = s.eval(x);
            let sign = if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            };
            if sign != 0 {
                if last != 0 && sign != last {
                    count += 1;
                }
                last = sign;
            }
        }
        count
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

fn exact(x: f64) -> Rational {
    <Rational as Scalar>::from_f64(x).expect("finite endpoint")
}

/// All distinct real roots of `p`, each located to a relative width of
/// `1e-12`. Coefficients are taken as exact binary rationals so that no root
/// is lost to rounding in the isolation phase.
pub fn real_roots(p: &RealPolynomial<f64>) -> Vec<f64> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let exact_p = RealPolynomial::new(p.coeffs().iter().map(|&c| exact(c)).collect());
    let sturm = SturmSequence::new(&exact_p);
    let lead = p.leading().abs();
    let bound = p.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs() / lead)) + 1.0;
    let bound = 2f64.powi(bound.log2().ceil() as i32 + 1);
    let mut out = Vec::new();
    let (lo, hi) = (-bound, bound);
    let n = sturm.count(&exact(lo), &exact(hi));
    isolate(&sturm, lo, hi, n, &mut out);
    out.sort_by(f64::total_cmp);
    out
}

fn isolate(s: &SturmSequence, lo: f64, hi: f64, n: usize, out: &mut Vec<f64>) {
    if n == 0 {
        return;
    }
    let width = hi - lo;
    let small = width <= 1e-12 * lo.abs().max(hi.abs()).max(1.0);
    let mid = 0.5 * (lo + hi);
    if small || mid <= lo || mid >= hi {
        out.push(mid);
        return;
    }
    if n == 1 && s.polynomial().eval(&exact(hi)).is_zero() {
        out.push(hi);
        return;
    }
    let split = choose_split(s, lo, hi);
    let left = s.count(&exact(lo), &exact(split));
    isolate(s, lo, split, left, out);
    isolate(s, split, hi, n - left, out);
}

/// A point near the midpoint that is not itself a root, so counts on both
/// halves stay well defined.
fn choose_split(s: &SturmSequence, lo: f64, hi: f64) -> f64 {
    let w = hi - lo;
    for k in 0..16 {
        let frac = 0.5 + (k as f64) * 1e-3 * if k % 2 == 0 { 1.0 } else { -1.0 };
        let x = lo + w * frac;
        if x > lo && x < hi && !s.polynomial().eval(&exact(x)).is_zero() {
            return x;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_square_splits_into_equal_quadratics() {
        let q = quadratic_real_factors(&RealPolynomial::new(vec![1.0, 0.0, 2.0, 0.0, 1.0])).unwrap();
        assert_eq!(q.len(), 2);
        for f in q {
            assert!((f.coeff(0) - 1.0).abs() < 1e-7 && f.coeff(1).abs() < 1e-7);
        }
    }

    #[test]
    fn distinct_quadratics_recovered() {
        let p = &RealPolynomial::new(vec![1.0, 0.0, 1.0]) * &RealPolynomial::new(vec![4.0, 0.0, 1.0]);
        let q = quadratic_real_factors(&p).unwrap();
        let cs: Vec<f64> = q.iter().map(|f| f.coeff(0)).collect();
        assert!((cs[0] - 1.0).abs() < 1e-12 && (cs[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn real_root_detected() {
        let p = &RealPolynomial::new(vec![-1.0, 0.0, 1.0]) * &RealPolynomial::new(vec![4.0, 0.0, 1.0]);
        assert_eq!(quadratic_real_factors(&p), Err(Error::RealRootPresent));
    }

    #[test]
    fn sturm_finds_clustered_roots() {
        let roots = [-3.0, 0.0, 2f64.powi(-10), 2.0, 2.0 + 2f64.powi(-20)];
        let p = roots.iter().fold(RealPolynomial::one(), |acc, &r| &acc * &RealPolynomial::linear_root(r));
        let found = real_roots(&p);
        assert_eq!(found.len(), 5, "{found:?}");
        for (a, b) in found.iter().zip(roots) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn no_real_roots() {
        assert!(real_roots(&RealPolynomial::new(vec![1.0, 0.0, 1.0])).is_empty());
        assert!(real_roots(&RealPolynomial::new(vec![3.0])).is_empty());
    }

    #[test]
    fn double_root_reported_once() {
        let p = RealPolynomial::new(vec![1.0, -2.0, 1.0]);
        let r = real_roots(&p);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-11);
    }
}
