//! One-dimensional bracketed maximization.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Maximum {
    let mut evaluations = 0;
    let mut eval = |x: f64, n: &mut usize| {
        *n += 1;
        f(x)
    };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1, &mut evaluations);
    let mut f2 = eval(x2, &mut evaluations);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1, &mut evaluations);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2, &mut evaluations);
        }
    }
    if f1 >= f2 {
        Maximum {
            x: x1,
            value: f1,
            evaluations,
        }
    } else {
        Maximum {
            x: x2,
            value: f2,
            evaluations,
        }
    }
}

/// Maximize `f` on `[lo, hi]`: evaluate an evenly spaced grid of `grid`
/// points (endpoints included), then refine around the best grid point with
/// golden-section search inside its neighbouring grid cells. The better of
/// the grid winner and the refined point is returned.
pub fn grid_then_golden<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    grid: usize,
    tol: f64,
) -> Maximum {
    let grid = grid.max(2);
    let xs: Vec<f64> = (0..grid)
        .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let (best, &best_val) = vals
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, (i, v)| {
            if *v > *acc.1 {
                (i, v)
            } else {
                acc
            }
        });
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(grid - 1)];
    let refined = golden_section_max(&mut f, a, b, tol);
    let evaluations = grid + refined.evaluations;
    if refined.value > best_val {
        Maximum {
            evaluations,
            ..refined
        }
    } else {
        Maximum {
            x: xs[best],
            value: best_val,
            evaluations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let m = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-8);
        assert!((m.x - 0.3).abs() < 1e-7);
    }

    #[test]
    fn grid_escapes_a_local_maximum() {
        // local bump at 0.1, global peak at 0.8
        let f = |x: f64| {
            (-(x - 0.1f64).powi(2) * 400.0).exp() * 0.5 + (-(x - 0.8f64).powi(2) * 400.0).exp()
        };
        let m = grid_then_golden(f, 0.0, 1.0, 64, 1e-9);
        assert!((m.x - 0.8).abs() < 1e-6);
    }

    #[test]
    fn boundary_maximum() {
        let m = grid_then_golden(|x| x, 0.0, 1.0, 64, 1e-6);
        assert!(m.x > 1.0 - 1e-6);
        assert!(m.value > 1.0 - 1e-6);
    }
}
