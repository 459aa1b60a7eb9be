//! Exponentials of truncated single-mode generators.
//!
//! Two routes: a dense scaling-and-squaring Taylor exponential for small
//! cutoffs, and a matrix-free Taylor action with substepping for large ones
//! where a dense `(cutoff+1)²` matrix and its squarings would be wasteful.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64], out: &mut [Complex64]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.data[i * n..(i + 1) * n]
                .iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum();
        }
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn scale(&mut self, s: f64) {
        for x in &mut self.data {
            *x *= s;
        }
    }
}

/// `exp(G)` by scaling and squaring with a Taylor core.
pub fn expm_dense(g: &DenseMatrix) -> DenseMatrix {
    let n = g.n;
    let norm = g.norm1();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let mut a = g.clone();
    a.scale(0.5f64.powi(squarings as i32));

    // ‖A‖ ≤ 1/2, so 30 terms put the remainder far below round-off.
    let mut result = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    for k in 1..=30 {
        term = term.matmul(&a);
        term.scale(1.0 / k as f64);
        let tn = term.norm1();
        for (r, t) in result.data.iter_mut().zip(&term.data) {
            *r += t;
        }
        if tn < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

/// `exp(G)·v` for a generator supplied as a matvec closure, with `norm` an
/// upper bound on `‖G‖`.
pub fn expm_action<F>(apply: F, norm: f64, v: &[Complex64]) -> Vec<Complex64>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    let steps = norm.ceil().max(1.0) as usize;
    let h = 1.0 / steps as f64;
    let mut x = v.to_vec();
    let mut term = vec![ZERO; v.len()];
    let mut next = vec![ZERO; v.len()];
    for _ in 0..steps {
        term.copy_from_slice(&x);
        let xn = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for k in 1..=60 {
            apply(&term, &mut next);
            let f = h / k as f64;
            let mut tn = 0.0;
            for (t, nx) in term.iter_mut().zip(&next) {
                *t = nx * f;
                tn += t.norm_sqr();
            }
            for (xi, t) in x.iter_mut().zip(&term) {
                *xi += t;
            }
            if tn.sqrt() <= 1e-17 * xn {
                break;
            }
        }
    }
    x
}

/// Truncated `â` on `0..=cutoff` (row-major, `⟨n|â|n+1⟩ = √(n+1)`).
pub fn annihilation_matrix(cutoff: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(cutoff + 1);
    for n in 0..cutoff {
        m.set(n, n + 1, Complex64::new(((n + 1) as f64).sqrt(), 0.0));
    }
    m
}

/// Displacement generator `αâ† − α*â`.
pub fn displacement_generator(alpha: Complex64, cutoff: usize) -> DenseMatrix {
    let mut g = DenseMatrix::zeros(cutoff + 1);
    for n in 0..cutoff {
        let s = ((n + 1) as f64).sqrt();
        g.set(n + 1, n, alpha * s);
        g.set(n, n + 1, -alpha.conj() * s);
    }
    g
}

/// Squeezing generator `½ξ*â² − ½ξâ†²`.
pub fn squeeze_generator(xi: Complex64, cutoff: usize) -> DenseMatrix {
    let mut g = DenseMatrix::zeros(cutoff + 1);
    for n in 0..cutoff.saturating_sub(1) {
        let s = (((n + 1) * (n + 2)) as f64).sqrt();
        g.set(n, n + 2, 0.5 * xi.conj() * s);
        g.set(n + 2, n, -0.5 * xi * s);
    }
    g
}

/// Matrix-free `(αâ† − α*â)·v`.
pub fn apply_displacement_generator(alpha: Complex64, v: &[Complex64], out: &mut [Complex64]) {
    let d = v.len();
    for n in 0..d {
        let mut acc = ZERO;
        if n > 0 {
            acc += alpha * (n as f64).sqrt() * v[n - 1];
        }
        if n + 1 < d {
            acc -= alpha.conj() * ((n + 1) as f64).sqrt() * v[n + 1];
        }
        out[n] = acc;
    }
}

/// Matrix-free `(½ξ*â² − ½ξâ†²)·v`.
pub fn apply_squeeze_generator(xi: Complex64, v: &[Complex64], out: &mut [Complex64]) {
    let d = v.len();
    for n in 0..d {
        let mut acc = ZERO;
        if n + 2 < d {
            acc += 0.5 * xi.conj() * (((n + 1) * (n + 2)) as f64).sqrt() * v[n + 2];
        }
        if n >= 2 {
            acc -= 0.5 * xi * ((n * (n - 1)) as f64).sqrt() * v[n - 2];
        }
        out[n] = acc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent reference: classical RK4 integration of `ẋ = Gx` over `[0, 1]`.
    fn rk4_action(g: &DenseMatrix, v: &[Complex64], steps: usize) -> Vec<Complex64> {
        let h = 1.0 / steps as f64;
        let n = v.len();
        let mut x = v.to_vec();
        let f = |y: &[Complex64]| {
            let mut o = vec![ZERO; n];
            g.matvec(y, &mut o);
            o
        };
        for _ in 0..steps {
            let k1 = f(&x);
            let y2: Vec<_> = x.iter().zip(&k1).map(|(a, b)| a + b * (h / 2.0)).collect();
            let k2 = f(&y2);
            let y3: Vec<_> = x.iter().zip(&k2).map(|(a, b)| a + b * (h / 2.0)).collect();
            let k3 = f(&y3);
            let y4: Vec<_> = x.iter().zip(&k3).map(|(a, b)| a + b * h).collect();
            let k4 = f(&y4);
            for i in 0..n {
                x[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
            }
        }
        x
    }

    fn basis(n: usize, k: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; n];
        v[k] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn dense_exponential_matches_rk4() {
        let g = displacement_generator(Complex64::new(1.2, -0.7), 30);
        let u = expm_dense(&g);
        for k in [0usize, 3, 7] {
            let v = basis(31, k);
            let mut a = vec![ZERO; 31];
            u.matvec(&v, &mut a);
            let b = rk4_action(&g, &v, 4000);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn exp_of_anti_hermitian_generator_is_unitary() {
        let g = squeeze_generator(Complex64::from_polar(0.5, 0.3), 40);
        let u = expm_dense(&g);
        let mut ud = DenseMatrix::zeros(u.n);
        for i in 0..u.n {
            for j in 0..u.n {
                ud.set(i, j, u.get(j, i).conj());
            }
        }
        let p = ud.matmul(&u);
        let id = DenseMatrix::identity(u.n);
        let err = p
            .data
            .iter()
            .zip(&id.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn action_matches_dense() {
        let alpha = Complex64::new(-0.4, 1.1);
        let xi = Complex64::from_polar(0.45, 2.0);
        let d = 50;
        let v: Vec<_> = (0..d)
            .map(|n| Complex64::new((n as f64 * 0.3).sin(), (n as f64).cos() * 0.1))
            .collect();

        let ud = expm_dense(&displacement_generator(alpha, d - 1));
        let mut a = vec![ZERO; d];
        ud.matvec(&v, &mut a);
        let norm = 2.0 * alpha.norm() * (d as f64).sqrt();
        let b = expm_action(|x, o| apply_displacement_generator(alpha, x, o), norm, &v);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-11);
        }

        let us = expm_dense(&squeeze_generator(xi, d - 1));
        us.matvec(&v, &mut a);
        let norm = xi.norm() * d as f64;
        let b = expm_action(|x, o| apply_squeeze_generator(xi, x, o), norm, &v);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-11);
        }
    }

    #[test]
    fn zero_generator_gives_identity() {
        let u = expm_dense(&DenseMatrix::zeros(5));
        assert_eq!(u, DenseMatrix::identity(5));
    }

    #[test]
    fn matrix_free_generators_agree_with_dense_ones() {
        let alpha = Complex64::new(0.3, 0.8);
        let xi = Complex64::new(-0.2, 0.6);
        let v: Vec<_> = (0..12).map(|n| Complex64::new(n as f64, 1.0)).collect();
        let mut a = vec![ZERO; 12];
        let mut b = vec![ZERO; 12];
        displacement_generator(alpha, 11).matvec(&v, &mut a);
        apply_displacement_generator(alpha, &v, &mut b);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-13));
        squeeze_generator(xi, 11).matvec(&v, &mut a);
        apply_squeeze_generator(xi, &v, &mut b);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-13));
        assert_eq!(annihilation_matrix(2).get(0, 1), Complex64::new(1.0, 0.0));
    }
}
