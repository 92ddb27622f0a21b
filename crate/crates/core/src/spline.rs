//! Bernstein, B-spline and NURBS bases evaluated element by element through
//! Bézier extraction.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Open (clamped) knot vector.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    knots: Vec<f64>,
    degree: usize,
}

impl KnotVector {
    pub fn new(knots: Vec<f64>, degree: usize) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidDegree(degree));
        }
        let p = degree;
        let bad = |m: &str| Err(Error::UnsupportedKnotVector(m.to_string()));
        if knots.len() < 2 * (p + 1) {
            return bad("too few knots for the degree");
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return bad("non-finite knot");
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return bad("knots must be nondecreasing");
        }
        let m = knots.len();
        if knots[..=p].iter().any(|&k| k != knots[0]) || knots[m - p - 1..].iter().any(|&k| k != knots[m - 1]) {
            return bad("knot vector is not open: end knots must be repeated p+1 times");
        }
        if knots[0] == knots[m - 1] {
            return bad("no nonempty knot span");
        }
        if knots[p + 1] == knots[0] || knots[m - p - 2] == knots[m - 1] {
            return bad("end knot multiplicity exceeds p+1");
        }
        let mut i = 0;
        while i < m {
            let mut j = i;
            while j + 1 < m && knots[j + 1] == knots[i] {
                j += 1;
            }
            if j - i + 1 > p + 1 {
                return bad("knot multiplicity exceeds p+1");
            }
            i = j + 1;
        }
        Ok(KnotVector { knots, degree })
    }

    /// Open knot vector on [0, 1] with `n_el` equal spans.
    pub fn uniform(degree: usize, n_el: usize) -> Result<Self> {
        if n_el == 0 {
            return Err(Error::UnsupportedKnotVector("zero elements".into()));
        }
        let mut k = vec![0.0; degree + 1];
        for i in 1..n_el {
            k.push(i as f64 / n_el as f64);
        }
        k.extend(std::iter::repeat(1.0).take(degree + 1));
        KnotVector::new(k, degree)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Nonempty spans as (span index i with knots[i] < knots[i+1], left, right).
    pub fn spans(&self) -> Vec<(usize, f64, f64)> {
        (self.degree..self.n_basis())
            .filter(|&i| self.knots[i] < self.knots[i + 1])
            .map(|i| (i, self.knots[i], self.knots[i + 1]))
            .collect()
    }

    /// Greville abscissae (control-point parameters of the identity map).
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        (0..self.n_basis())
            .map(|i| self.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }
}

/// Bernstein polynomials of degree p on [0, 1] with first and second derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Bernstein {
    pub values: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

fn bernstein_values(p: usize, t: f64) -> Vec<f64> {
    // de Casteljau triangle, stable at the end points
    let mut b = vec![0.0; p + 1];
    b[0] = 1.0;
    for j in 1..=p {
        let mut saved = 0.0;
        for k in 0..j {
            let tmp = b[k];
            b[k] = saved + (1.0 - t) * tmp;
            saved = t * tmp;
        }
        b[j] = saved;
    }
    b
}

pub fn bernstein(p: usize, t: f64) -> Result<Bernstein> {
    if p < 1 {
        return Err(Error::InvalidDegree(p));
    }
    let values = bernstein_values(p, t);
    let lower = bernstein_values(p - 1, t);
    let at = |v: &[f64], i: isize| if i < 0 || i as usize >= v.len() { 0.0 } else { v[i as usize] };
    let pf = p as f64;
    let d1 = (0..=p as isize).map(|i| pf * (at(&lower, i - 1) - at(&lower, i))).collect();
    let d2 = if p >= 2 {
        let low2 = bernstein_values(p - 2, t);
        let c = pf * (pf - 1.0);
        (0..=p as isize)
            .map(|i| c * (at(&low2, i - 2) - 2.0 * at(&low2, i - 1) + at(&low2, i)))
            .collect()
    } else {
        vec![0.0; p + 1]
    };
    Ok(Bernstein { values, d1, d2 })
}

/// Per-element map from Bernstein polynomials to the B-splines supported on
/// the element: `N = C B`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionOperator {
    pub matrix: DMatrix<f64>,
}

pub fn build_extraction(kv: &KnotVector) -> Result<Vec<ExtractionOperator>> {
    let p = kv.degree();
    let u = kv.knots();
    let m = u.len();
    // 1-based views keep the classical algorithm readable
    let uk = |i: usize| u[i - 1];
    let mut ops = vec![DMatrix::<f64>::identity(p + 1, p + 1)];
    let mut a = p + 1;
    let mut b = a + 1;
    let mut nb = 0usize;
    let mut alphas = vec![0.0; p + 1];
    while b < m {
        ops.push(DMatrix::identity(p + 1, p + 1));
        let i = b;
        while b < m && uk(b + 1) == uk(b) {
            b += 1;
        }
        let mult = b - i + 1;
        if mult < p {
            let numer = uk(b) - uk(a);
            for j in (mult + 1..=p).rev() {
                alphas[j - mult] = numer / (uk(a + j) - uk(a));
            }
            let r = p - mult;
            for j in 1..=r {
                let save = r - j + 1;
                let s = mult + j;
                for k in (s + 1..=p + 1).rev() {
                    let alpha = alphas[k - s];
                    for row in 0..=p {
                        let v = alpha * ops[nb][(row, k - 1)] + (1.0 - alpha) * ops[nb][(row, k - 2)];
                        ops[nb][(row, k - 1)] = v;
                    }
                }
                if b < m {
                    for l in 0..=j {
                        let v = ops[nb][(p - j + l, p)];
                        ops[nb + 1][(save - 1 + l, save - 1)] = v;
                    }
                }
            }
        }
        nb += 1;
        if b < m {
            a = b;
            b += 1;
        }
    }
    ops.truncate(kv.spans().len());
    Ok(ops.into_iter().map(|matrix| ExtractionOperator { matrix }).collect())
}

/// Univariate B-splines supported on one element, with derivatives w.r.t. the
/// global parameter.
#[derive(Debug, Clone)]
pub struct Univariate {
    pub values: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

pub fn bspline_on_element(ext: &ExtractionOperator, p: usize, span: (f64, f64), x: f64) -> Result<Univariate> {
    let h = span.1 - span.0;
    let t = ((x - span.0) / h).clamp(0.0, 1.0);
    let b = bernstein(p, t)?;
    let c = &ext.matrix;
    let apply = |v: &[f64], s: f64| -> Vec<f64> {
        (0..=p).map(|i| (0..=p).map(|j| c[(i, j)] * v[j]).sum::<f64>() * s).collect()
    };
    Ok(Univariate { values: apply(&b.values, 1.0), d1: apply(&b.d1, 1.0 / h), d2: apply(&b.d2, 1.0 / (h * h)) })
}

/// Rational basis on one element: values, first derivatives (∂/∂ξ, ∂/∂η) and
/// second derivatives (∂²/∂ξ², ∂²/∂ξ∂η, ∂²/∂η²). Local ordering is ξ-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEval {
    pub values: Vec<f64>,
    pub d1: Vec<[f64; 2]>,
    pub d2: Vec<[f64; 3]>,
}

impl BasisEval {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `N_{,αβ}` for α, β ∈ {0, 1}.
    #[inline]
    pub fn d2_ab(&self, a: usize, al: usize, be: usize) -> f64 {
        self.d2[a][al + be]
    }
}

/// Everything needed to evaluate the rational basis of one element.
#[derive(Debug, Clone, Copy)]
pub struct ElementSpline<'a> {
    pub ext: [&'a ExtractionOperator; 2],
    pub degrees: [usize; 2],
    pub spans: [(f64, f64); 2],
    pub weights: &'a [f64],
}

pub fn nurbs_eval(el: &ElementSpline, xi: f64, eta: f64) -> Result<BasisEval> {
    let u = bspline_on_element(el.ext[0], el.degrees[0], el.spans[0], xi)?;
    let v = bspline_on_element(el.ext[1], el.degrees[1], el.spans[1], eta)?;
    rational(&u, &v, el.degrees, el.weights)
}

/// The `p + 1` B-splines `N_{i−p..=i}` nonzero on span `i` and their first two
/// derivatives at `x`, by the Cox–de Boor recursion (reference path; the
/// element code uses extraction).
pub fn cox_de_boor(kv: &KnotVector, span: usize, x: f64) -> Result<Univariate> {
    let (p, u) = (kv.degree(), kv.knots());
    if span < p || span >= kv.n_basis() || !(u[span] < u[span + 1]) {
        return Err(Error::InvalidParameter(format!("{span} is not a nonempty knot span")));
    }
    let x = x.clamp(u[span], u[span + 1]);
    // triangular table: ndu[j][r] holds basis values, ndu[r][j] knot differences
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let (mut left, mut right) = (vec![0.0; p + 1], vec![0.0; p + 1]);
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = x - u[span + 1 - j];
        right[j] = u[span + j] - x;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let n_der = 2.min(p);
    let mut ders = vec![vec![0.0; p + 1]; 3];
    for j in 0..=p {
        ders[0][j] = ndu[j][p];
    }
    let mut a = vec![vec![0.0; p + 1]; 2];
    for r in 0..=p {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=n_der {
            let mut d = 0.0;
            let rk = r as isize - k as isize;
            let pk = p - k;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if (r as isize) - 1 <= pk as isize { k - 1 } else { p - r };
            for j in j1..=j2 {
                let idx = (rk + j as isize) as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                d += a[s2][j] * ndu[idx][pk];
            }
            if r <= pk {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = p as f64;
    for k in 1..=n_der {
        for v in ders[k].iter_mut() {
            *v *= factor;
        }
        factor *= (p - k) as f64;
    }
    let d2 = ders.pop().unwrap_or_default();
    let d1 = ders.pop().unwrap_or_default();
    Ok(Univariate { values: ders.pop().unwrap_or_default(), d1, d2 })
}

/// Rational basis from univariate B-splines in both directions and the
/// element's control weights (ξ-fastest).
pub fn rational(u: &Univariate, v: &Univariate, degrees: [usize; 2], weights: &[f64]) -> Result<BasisEval> {
    let [p, q] = degrees;
    let n = (p + 1) * (q + 1);
    if weights.len() != n {
        return Err(Error::InvalidParameter(format!("expected {n} weights, got {}", weights.len())));
    }
    if let Some((index, &weight)) = weights.iter().enumerate().find(|(_, &w)| !(w > 0.0)) {
        return Err(Error::InvalidWeight { index, weight });
    }
    let mut r = vec![0.0; n];
    let mut r1 = vec![[0.0; 2]; n];
    let mut r2 = vec![[0.0; 3]; n];
    let (mut w, mut w1, mut w2) = (0.0, [0.0; 2], [0.0; 3]);
    for j in 0..=q {
        for i in 0..=p {
            let a = i + (p + 1) * j;
            let wa = weights[a];
            r[a] = wa * u.values[i] * v.values[j];
            r1[a] = [wa * u.d1[i] * v.values[j], wa * u.values[i] * v.d1[j]];
            r2[a] = [wa * u.d2[i] * v.values[j], wa * u.d1[i] * v.d1[j], wa * u.values[i] * v.d2[j]];
            w += r[a];
            for k in 0..2 {
                w1[k] += r1[a][k];
            }
            for k in 0..3 {
                w2[k] += r2[a][k];
            }
        }
    }
    let mut values = vec![0.0; n];
    let mut d1 = vec![[0.0; 2]; n];
    let mut d2 = vec![[0.0; 3]; n];
    let pairs = [(0, 0), (0, 1), (1, 1)];
    for a in 0..n {
        let na = r[a] / w;
        values[a] = na;
        for k in 0..2 {
            d1[a][k] = (r1[a][k] - na * w1[k]) / w;
        }
        for (k, &(s, t)) in pairs.iter().enumerate() {
            d2[a][k] = (r2[a][k] - d1[a][s] * w1[t] - d1[a][t] * w1[s] - na * w2[k]) / w;
        }
    }
    Ok(BasisEval { values, d1, d2 })
}

/// Knot insertion on homogeneous control points (x w, y w, z w, w) of a curve.
pub fn insert_knot(kv: &KnotVector, pw: &[[f64; 4]], x: f64) -> Result<(KnotVector, Vec<[f64; 4]>)> {
    let p = kv.degree();
    let u = kv.knots();
    let n = kv.n_basis();
    if pw.len() != n {
        return Err(Error::InvalidParameter("control count does not match the knot vector".into()));
    }
    if !(x > u[0] && x < u[u.len() - 1]) {
        return Err(Error::InvalidParameter(format!("knot {x} outside the open interval")));
    }
    // span k with u[k] <= x < u[k+1]
    let k = (p..n).rev().find(|&i| u[i] <= x).unwrap_or(p);
    let mut q = Vec::with_capacity(n + 1);
    for i in 0..=n {
        if i + p <= k {
            q.push(pw[i]);
        } else if i > k {
            q.push(pw[i - 1]);
        } else {
            let alpha = (x - u[i]) / (u[i + p] - u[i]);
            let mut c = [0.0; 4];
            for d in 0..4 {
                c[d] = alpha * pw[i][d] + (1.0 - alpha) * pw[i - 1][d];
            }
            q.push(c);
        }
    }
    let mut knots = u.to_vec();
    knots.insert(k + 1, x);
    Ok((KnotVector::new(knots, p)?, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernstein_examples() {
        let b = bernstein(3, 0.0).unwrap();
        assert_eq!(b.values, vec![1.0, 0.0, 0.0, 0.0]);
        let b = bernstein(3, 0.5).unwrap();
        for (x, y) in b.values.iter().zip([0.125, 0.375, 0.375, 0.125]) {
            assert!((x - y).abs() < 1e-15);
        }
        let b = bernstein(1, 0.3).unwrap();
        assert!((b.values[0] - 0.7).abs() < 1e-15 && (b.values[1] - 0.3).abs() < 1e-15);
        assert_eq!(bernstein(0, 0.5), Err(Error::InvalidDegree(0)));
    }

    #[test]
    fn bernstein_derivative_sums_vanish() {
        for p in 1..6 {
            let b = bernstein(p, 0.37).unwrap();
            assert!((b.values.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(b.d1.iter().sum::<f64>().abs() < 1e-12);
            assert!(b.d2.iter().sum::<f64>().abs() < 1e-11);
        }
    }

    #[test]
    fn extraction_without_interior_knots_is_identity() {
        let kv = KnotVector::new(vec![0., 0., 0., 0., 1., 1., 1., 1.], 3).unwrap();
        let ops = build_extraction(&kv).unwrap();
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0].matrix, DMatrix::identity(4, 4));
    }

    #[test]
    fn linear_extraction_is_identity_per_span() {
        let kv = KnotVector::new(vec![0., 0., 0.5, 1., 1.], 1).unwrap();
        let ops = build_extraction(&kv).unwrap();
        assert_eq!(ops.len(), 2);
        for op in ops {
            assert_eq!(op.matrix, DMatrix::identity(2, 2));
        }
    }

    #[test]
    fn knot_vector_validation() {
        assert!(KnotVector::new(vec![0., 0., 1., 1.], 1).is_ok());
        assert!(KnotVector::new(vec![0., 0.5, 1., 1.], 1).is_err());
        assert!(KnotVector::new(vec![0., 0., 0., 1., 1.], 1).is_err());
        assert!(KnotVector::new(vec![0., 0., 0.5, 0.5, 0.5, 0.5, 1., 1., 1.], 2).is_err());
        assert!(KnotVector::new(vec![0., 0., 1., 1.], 0).is_err());
    }

    #[test]
    fn rejects_nonpositive_weights() {
        let kv = KnotVector::uniform(1, 1).unwrap();
        let ext = build_extraction(&kv).unwrap();
        let w = [1.0, 0.0, 1.0, 1.0];
        let el = ElementSpline { ext: [&ext[0], &ext[0]], degrees: [1, 1], spans: [(0., 1.), (0., 1.)], weights: &w };
        assert!(matches!(nurbs_eval(&el, 0.5, 0.5), Err(Error::InvalidWeight { index: 1, .. })));
    }
}
