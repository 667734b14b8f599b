//! Small dense linear algebra: Perron eigendata of nonnegative matrices,
//! stationary vectors of stochastic matrices, symmetric eigenvalues.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> SquareMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![S::zero(); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from rows; every row must have length `rows.len()`.
    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("matrix rows must all have length n".into()));
        }
        Ok(Self { n, data: rows.iter().flatten().copied().collect() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, x: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.n];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        out
    }
}

impl<S> Index<(usize, usize)> for SquareMatrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.n + j]
    }
}

impl<S> IndexMut<(usize, usize)> for SquareMatrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.n + j]
    }
}

/// Perron root and right eigenvector of an irreducible nonnegative matrix.
#[derive(Debug, Clone)]
pub struct Perron<S> {
    pub value: S,
    /// Positive right eigenvector scaled so its largest entry is 1.
    pub vector: Vec<S>,
    pub iterations: usize,
    /// Relative width of the final Collatz–Wielandt bracket.
    pub residual: S,
}

pub const PERRON_MAX_ITER: usize = 100_000;

/// Power iteration on `M + cI` with `c` the current upper Collatz–Wielandt
/// bound, so that period-p matrices still converge. The iterate stays
/// strictly positive, giving a two-sided bracket
/// `min (Mx)_i/x_i <= rho(M) <= max (Mx)_i/x_i` at every step.
///
/// Stops once the relative bracket is below `tol`, then keeps iterating
/// while the bracket still shrinks (at most 64 extra steps) so the result
/// is as accurate as rounding allows.
pub fn perron_right<S: Scalar>(m: &SquareMatrix<S>, tol: S, max_iter: usize) -> Result<Perron<S>> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let mut x = vec![S::one(); n];
    let mut best: Option<(S, S, Vec<S>)> = None;
    let mut extra = 0usize;
    for it in 0..max_iter {
        let y = m.mul_vec(&x);
        let mut lo = S::infinity();
        let mut hi = S::zero();
        for (&yi, &xi) in y.iter().zip(&x) {
            let r = yi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if !(lo.is_finite() && hi.is_finite()) || hi <= S::zero() {
            return Err(Error::NoConvergence { what: "perron iteration", iterations: it });
        }
        let width = (hi - lo) / hi;
        let improved = best.as_ref().is_none_or(|(w, _, _)| width < *w);
        if improved {
            best = Some((width, S::lit(0.5) * (lo + hi), x.clone()));
        }
        if width <= tol {
            if !improved || extra >= 64 || width == S::zero() {
                let (residual, value, vector) = best.expect("bracket recorded");
                return Ok(Perron { value, vector, iterations: it + 1, residual });
            }
            extra += 1;
        }
        let mut next: Vec<S> = y.iter().zip(&x).map(|(&yi, &xi)| yi + hi * xi).collect();
        let scale = next.iter().copied().fold(S::zero(), S::max);
        for v in &mut next {
            *v /= scale;
        }
        x = next;
    }
    Err(Error::NoConvergence { what: "perron iteration", iterations: max_iter })
}

/// Stationary row vector of an irreducible stochastic matrix by the
/// Grassmann–Taksar–Heyman elimination, which never subtracts and so keeps
/// full relative accuracy even for nearly decomposable chains.
pub fn gth_stationary<S: Scalar>(p: &SquareMatrix<S>) -> Result<Vec<S>> {
    let k = p.dim();
    let mut a = p.clone();
    for n in (1..k).rev() {
        let s: S = (0..n).map(|j| a[(n, j)]).sum();
        if s <= S::zero() {
            return Err(Error::ReducibleSupport);
        }
        for i in 0..n {
            a[(i, n)] /= s;
        }
        for i in 0..n {
            let ain = a[(i, n)];
            if ain == S::zero() {
                continue;
            }
            for j in 0..n {
                let anj = a[(n, j)];
                a[(i, j)] += ain * anj;
            }
        }
    }
    let mut pi = vec![S::zero(); k];
    pi[0] = S::one();
    for j in 1..k {
        pi[j] = (0..j).map(|i| pi[i] * a[(i, j)]).sum();
    }
    let total: S = pi.iter().copied().sum();
    if !(total.is_finite() && total > S::zero()) {
        return Err(Error::ReducibleSupport);
    }
    for v in &mut pi {
        *v /= total;
    }
    Ok(pi)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<S: Scalar>(a: &SquareMatrix<S>) -> Vec<S> {
    let n = a.dim();
    let mut m = a.clone();
    for _sweep in 0..100 {
        let off: S = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off <= S::epsilon() * S::epsilon() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == S::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (S::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<S> = (0..n).map(|i| m[(i, i)]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perron_of_golden_matrix() {
        let m = SquareMatrix::<f64>::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = perron_right(&m, 1e-13, PERRON_MAX_ITER).unwrap();
        assert!((p.value - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn perron_handles_period_two() {
        let m = SquareMatrix::<f64>::from_rows(&[vec![0.0, 2.0], vec![8.0, 0.0]]).unwrap();
        let p = perron_right(&m, 1e-13, PERRON_MAX_ITER).unwrap();
        assert!((p.value - 4.0).abs() < 1e-12, "{}", p.value);
    }

    #[test]
    fn gth_two_state() {
        let p = SquareMatrix::<f64>::from_rows(&[vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let pi = gth_stationary(&p).unwrap();
        assert!((pi[0] - 5.0 / 6.0).abs() < 1e-15);
        assert!((pi[1] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn gth_rejects_reducible() {
        let p = SquareMatrix::<f64>::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(gth_stationary(&p), Err(Error::ReducibleSupport));
    }

    #[test]
    fn jacobi_eigenvalues() {
        let a = SquareMatrix::<f64>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let ev = symmetric_eigenvalues(&a);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }
}
